"""
Django settings for the sparse support recovery toolkit
Command-line numerics with Celery fan-out for Monte Carlo campaigns
"""

import os
from pathlib import Path
import environ
import sentry_sdk
from sentry_sdk.integrations.django import DjangoIntegration

# Initialize environment variables
env = environ.Env(
    DEBUG=(bool, False)
)

BASE_DIR = Path(__file__).resolve().parent.parent
environ.Env.read_env(os.path.join(BASE_DIR, '.env'))

# Security
SECRET_KEY = env('DJANGO_SECRET_KEY', default='sparse-recovery-cli-only')
DEBUG = env('DEBUG')

ALLOWED_HOSTS = env.list('ALLOWED_HOSTS', default=['localhost', '127.0.0.1'])

# Application definition
INSTALLED_APPS = [
    # Third party
    'rest_framework',

    # Local apps
    'core',
    'recovery',
]

# No models: every command is a pure computation over its flags
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework (serializers validate flags, JSONRenderer renders --format json)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'COERCE_DECIMAL_TO_STRING': False,
    'UNAUTHENTICATED_USER': None,
}

# Celery Configuration - eager unless a broker is configured
REDIS_URL = env('REDIS_URL', default='')
CELERY_BROKER_URL = REDIS_URL or 'memory://'
CELERY_RESULT_BACKEND = REDIS_URL or 'cache+memory://'
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TASK_ALWAYS_EAGER = env.bool('CELERY_TASK_ALWAYS_EAGER', default=not REDIS_URL)
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_WORKER_CONCURRENCY = env.int('CELERY_WORKER_CONCURRENCY', default=2)
CELERY_RESULT_EXPIRES = 3600  # 1 hour

# Support enumeration (exhaustive decoders refuse to go past this)
ENUMERATION_CAP = env.int('ENUMERATION_CAP', default=10**6)

# Mixture entropy quadrature
QUADRATURE_TOLERANCE = env.float('QUADRATURE_TOLERANCE', default=1e-8)
QUADRATURE_SUBDIVISION_LIMIT = env.int('QUADRATURE_SUBDIVISION_LIMIT', default=200)
MAX_MIXTURE_COMPONENTS = env.int('MAX_MIXTURE_COMPONENTS', default=10**4)

# Monte Carlo and oracles
MONTE_CARLO_CHUNK_SIZE = env.int('MONTE_CARLO_CHUNK_SIZE', default=250)
ORACLE_BATCH_SIZE = env.int('ORACLE_BATCH_SIZE', default=10**4)
ORACLE_SIGMAS = env.float('ORACLE_SIGMAS', default=5.0)
VERIFY_COVARIANCE_SAMPLES = env.int('VERIFY_COVARIANCE_SAMPLES', default=200_000)
VERIFY_DENSITY_SAMPLES = env.int('VERIFY_DENSITY_SAMPLES', default=10**6)

# Output rendering
CSV_SIGNIFICANT_DIGITS = 9

# Sweep defaults for the three-regime figure
FIGURE_DEFAULTS = {
    'p': 64,
    'k': 8,
    'beta_min': 1.0,
    'gamma': 1.0,
    'n': 1,
}

# Sentry Error Tracking
if env('SENTRY_DSN', default=None):
    sentry_sdk.init(
        dsn=env('SENTRY_DSN'),
        integrations=[DjangoIntegration()],
        traces_sample_rate=0.0,
        send_default_pii=False,
        environment='production' if not DEBUG else 'development'
    )

# Logging Configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {asctime} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple' if not DEBUG else 'verbose'
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING' if not DEBUG else 'DEBUG',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'recovery': {
            'handlers': ['console'],
            'level': env('RECOVERY_LOG_LEVEL', default='DEBUG' if DEBUG else 'INFO'),
            'propagate': False,
        },
        'core': {
            'handlers': ['console'],
            'level': 'DEBUG' if DEBUG else 'INFO',
            'propagate': False,
        },
        'celery': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}
