"""
Django app configuration for the support recovery toolkit
"""

from django.apps import AppConfig


class RecoveryConfig(AppConfig):
    """Bounds, mixtures, ensembles and the command-line surface"""

    default_auto_field = 'django.db.models.BigAutoField'
    name = 'recovery'
    verbose_name = 'Sparse Support Recovery'
