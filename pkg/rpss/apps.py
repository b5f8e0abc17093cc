from django.apps import AppConfig


class RpssAppConfig(AppConfig):
    name = "rpss"
    verbose_name = "Random permutation sorting system"
