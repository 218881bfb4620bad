from django.urls import path
from .views import SimulationRunDetailView, SimulationRunListView

app_name = 'simulations'

urlpatterns = [
    path('', SimulationRunListView.as_view(), name='run_list'),
    path('<int:pk>/', SimulationRunDetailView.as_view(), name='run_detail'),
]
