"""
Celery configuration for the sparse support recovery toolkit
"""

import os
from celery import Celery

# Set default Django settings module
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')

# Create Celery app
app = Celery('sparse_recovery')

# Configure from Django settings
app.config_from_object('django.conf:settings', namespace='CELERY')

# Auto-discover tasks
app.autodiscover_tasks()

# Task routing
app.conf.task_routes = {
    'recovery.tasks.run_trial_chunk': {'queue': 'trials'},
    'recovery.tasks.*': {'queue': 'default'},
}

# Task time limits
app.conf.task_time_limit = 600  # 10 minutes
app.conf.task_soft_time_limit = 540  # 9 minutes

# Worker configuration
app.conf.worker_prefetch_multiplier = 1
app.conf.worker_max_tasks_per_child = 100
