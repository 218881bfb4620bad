"""
URL configuration for randclust project.
"""
from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path('admin/', admin.site.urls),
    path('', include('core.urls')),
    path('simulaciones/', include('simulations.urls')),
]
