from django.apps import AppConfig

class IsomapConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'Isomap'
