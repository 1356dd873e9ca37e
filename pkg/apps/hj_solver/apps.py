from django.apps import AppConfig


class HjSolverConfig(AppConfig):
    name = "apps.hj_solver"
    label = "hj_solver"
    verbose_name = "Semi-Lagrangian solver"
