"""
Base común de los comandos `generate`, `cocluster`, `simulate`, `bench` y `scree`.

Códigos de salida: 0 éxito, 1 falla en tiempo de ejecución, 2 falla de
validación.
"""
import argparse
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from core.conf import default_threads
from core.exceptions import RandclustError

logger = logging.getLogger(__name__)

EXIT_RUNTIME = 1
EXIT_VALIDATION = 2


def non_negative_int(value):
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f'se esperaba un entero no negativo, se recibió {value}')
    return number


def positive_int(value):
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f'se esperaba un entero positivo, se recibió {value}')
    return number


def positive_int_list(value):
    try:
        return [positive_int(item) for item in value.split(',') if item.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f'lista de enteros inválida: {value}') from error


class RandclustCommand(BaseCommand):
    """
    Agrega `--threads` a todos los comandos y traduce las excepciones del
    proyecto a CommandError con el código de salida que corresponde.
    """

    def add_arguments(self, parser):
        parser.add_argument(
            '--threads',
            type=positive_int,
            default=None,
            help='Hilos de trabajo (por defecto RANDCLUST_THREADS)',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        options['threads'] = options['threads'] or default_threads()
        try:
            self.run(options)
        except ValidationError as error:
            raise CommandError('\n'.join(error.messages), returncode=EXIT_VALIDATION) from error
        except RandclustError as error:
            raise CommandError(str(error), returncode=EXIT_RUNTIME) from error
        except OSError as error:
            raise CommandError(f'{error.filename}: {error.strerror}', returncode=EXIT_RUNTIME) from error

    def run(self, options):
        raise NotImplementedError

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))
