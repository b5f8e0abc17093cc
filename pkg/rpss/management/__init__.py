# rpss/management/__init__.py
