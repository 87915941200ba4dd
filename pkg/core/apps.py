from django.apps import AppConfig


class CoreConfig(AppConfig):
    """Exceptions, rendering and config-file helpers"""

    default_auto_field = 'django.db.models.BigAutoField'
    name = 'core'
    verbose_name = 'Core Utilities'
