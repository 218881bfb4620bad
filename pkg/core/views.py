from django.views.generic import TemplateView

from simulations.models import SimulationRun


class HomeView(TemplateView):
    """
    Vista de inicio: últimas corridas de simulación guardadas.
    """
    template_name = 'home.html'

    def get_context_data(self, **kwargs):
        context = super().get_context_data(**kwargs)
        context['ultimas_corridas'] = SimulationRun.objects.all()[:5]
        return context
