from django.apps import AppConfig


class MetricGraphConfig(AppConfig):
    name = "apps.metric_graph"
    label = "metric_graph"
    verbose_name = "Metric graphs"
