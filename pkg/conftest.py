"""Point pytest at the Django settings so the SimpleTestCase suites run."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
django.setup()
