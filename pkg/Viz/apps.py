from django.apps import AppConfig

class VizConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'Viz'
