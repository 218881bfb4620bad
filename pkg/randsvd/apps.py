from django.apps import AppConfig


class RandsvdConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'randsvd'
    verbose_name = 'SVD aleatorizada'
