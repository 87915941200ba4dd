"""
Shared plumbing for the recovery commands
Flag/config precedence, validation, error mapping and output rendering
"""

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from core.exceptions import command_exception_handler
from core.utils import parse_config_file, render_csv, render_json, write_output

OUTPUT_SCHEMA = {'format': str, 'out': str}


class RecoveryCommand(BaseCommand):
    """
    Base command: flags > --config file > serializer defaults

    Subclasses set serializer_class and config_schema (flag name -> cast)
    and implement execute_validated().
    """

    serializer_class = None
    config_schema = {}
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--config', type=str, help='Plain-text key = value file; flags override it')
        parser.add_argument('--format', type=str, choices=['csv', 'json'], help='Output format (default csv)')
        parser.add_argument('--out', type=str, help='Output path (default stdout)')

    def add_params_arguments(self, parser, n_required=False):
        parser.add_argument('--p', type=int, help='Ambient dimension')
        parser.add_argument('--k', type=int, help='Signal sparsity')
        parser.add_argument('--n', type=int,
                            help='Number of measurements' + ('' if n_required else ' (default 1)'))
        parser.add_argument('--beta-min', type=float, help='Smallest nonzero magnitude')
        parser.add_argument('--beta-min-sq', type=float, help='Square of --beta-min, as an alternative')
        parser.add_argument('--gamma', type=float, help='Measurement sparsity in (0, 1] (default 1)')

    @property
    def schema(self):
        return {**OUTPUT_SCHEMA, **self.config_schema}

    def collect(self, options):
        data = {}
        if options.get('config'):
            for key, value in parse_config_file(options['config'], self.schema).items():
                data[key.replace('-', '_')] = value
        for key in self.schema:
            dest = key.replace('-', '_')
            if options.get(dest) is not None:
                data[dest] = options[dest]
        return data

    def handle(self, *args, **options):
        try:
            serializer = self.serializer_class(data=self.collect(options))
            serializer.is_valid(raise_exception=True)
            self.execute_validated(serializer.validated_data)
        except CommandError:
            raise
        except Exception as exc:
            error = command_exception_handler(exc)
            if error is None:
                raise
            if isinstance(exc, serializers.ValidationError):
                usage = self.create_parser('manage.py', self.command_name).format_usage()
                error = CommandError(f"{error}\n{usage.rstrip()}", returncode=error.returncode)
            raise error from exc

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def execute_validated(self, data):
        raise NotImplementedError

    def emit(self, records, columns, data, metadata=None):
        """Render records as CSV or JSON and write them to --out or stdout"""
        if data['format'] == 'json':
            content = render_json({'metadata': metadata or {}, 'records': list(records)})
        else:
            content = render_csv(records, columns)
        write_output(content, data.get('out'), self.stdout)
        if data.get('out'):
            self.stdout.write(self.style.SUCCESS(f"Wrote {len(records)} row(s) to {data['out']}"))
