from django.apps import AppConfig

class LandmarksConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'Landmarks'
