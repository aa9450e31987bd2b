"""
Django settings for the Lens coordinates project.

Every knob is read from the environment (a local .env file is honoured), so the
same settings serve the CLI, the Celery worker and CI.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# The project has no web surface; the key only satisfies Django's startup checks.
SECRET_KEY = os.environ.get('SECRET_KEY', 'lens-coordinates-local-key')

DEBUG = os.environ.get('DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'rest_framework',
    'Geometry',
    'Spaces',
    'Landmarks',
    'Persistence',
    'LensMap',
    'Lpca',
    'Viz',
    'Isomap',
    'Pipeline.apps.PipelineConfig',
]

MIDDLEWARE = []


# Celery Configuration
# Without a broker (local runs, CI) tasks execute eagerly in-process.
CELERY_BROKER_URL = os.environ.get('CELERY_BROKER_URL')
CELERY_RESULT_BACKEND = os.environ.get('CELERY_RESULT_BACKEND', CELERY_BROKER_URL)

if os.environ.get('CI') or not CELERY_BROKER_URL:
    CELERY_TASK_ALWAYS_EAGER = True
    CELERY_TASK_EAGER_PROPAGATES = True

CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'


# Database
# Only the run ledger (Pipeline.PipelineRun) lives here.

if os.environ.get('DATABASE_URL'):
    import dj_database_url
    DATABASES = {
        'default': dj_database_url.parse(os.environ.get('DATABASE_URL'))
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': BASE_DIR / 'lens_runs.sqlite3',
        }
    }


# Lens pipeline
LENS_THREADS = int(os.environ.get('LENS_THREADS', os.cpu_count() or 1))
LENS_DISTANCE_MATRIX_CAP = int(os.environ.get('LENS_DISTANCE_MATRIX_CAP', 20000))
LENS_OUTPUT_DIR = Path(os.environ.get('LENS_OUTPUT_DIR', BASE_DIR / 'lens_output'))
LENS_RECORD_RUNS = os.environ.get('LENS_RECORD_RUNS', 'True').lower() == 'true'
LENS_LOG_LEVEL = os.environ.get('LENS_LOG_LEVEL', 'INFO')


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'timestamped': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'timestamped',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LENS_LOG_LEVEL,
    },
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Default primary key field type

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
