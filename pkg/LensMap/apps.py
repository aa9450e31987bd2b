from django.apps import AppConfig

class LensMapConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'LensMap'
