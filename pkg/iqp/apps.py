from django.apps import AppConfig


class IqpConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'iqp'
    verbose_name = "IQP circuit experiments"
