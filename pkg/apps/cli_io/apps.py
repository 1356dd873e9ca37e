from django.apps import AppConfig


class CliIoConfig(AppConfig):
    name = "apps.cli_io"
    label = "cli_io"
    verbose_name = "Scenarios and command line"
