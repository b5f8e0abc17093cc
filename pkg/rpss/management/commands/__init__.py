# rpss/management/commands/__init__.py
