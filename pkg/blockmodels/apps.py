from django.apps import AppConfig


class BlockmodelsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'blockmodels'
    verbose_name = 'Modelos de co-bloques'
