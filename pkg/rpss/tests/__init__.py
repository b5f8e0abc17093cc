# rpss/tests/__init__.py
