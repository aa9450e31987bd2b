from celery import Celery
import os

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')

app = Celery('Pipeline')
app.config_from_object('django.conf:settings', namespace='CELERY')

# Pipeline runs are on-demand (seed sweeps); nothing is scheduled periodically.
app.conf.beat_schedule = {}

app.autodiscover_tasks()
