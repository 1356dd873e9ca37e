from django.apps import AppConfig


class HamiltonianConfig(AppConfig):
    name = "apps.hamiltonian"
    label = "hamiltonian"
    verbose_name = "Hamiltonians and Lagrangians"
