"""
The `qflab` command.

Results go to stdout, as text or (with --json) as one JSON document; logs and errors go to stderr.
Exit status: 0 when the answer is determinate, 2 when it is Unknown, 1 on any error.
"""

import argparse
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, Final, NoReturn

from qflab.curves import DeltaVerdict, delta_image_report
from qflab.errors import CommandLineError, MissingDependencyError, QflabError
from qflab.forms import (
    DiagonalForm,
    anisotropic_places,
    form_support,
    invariants,
    is_isometric,
    is_isotropic_over,
    represents,
    witt_decompose,
)
from qflab.log_context import bind_log_context
from qflab.logging_config import configure_logging
from qflab.logging_manager import get_logger
from qflab.obstruction import (
    ChowClassCandidate,
    FibrationInstance,
    GlobalVerdict,
    ObstructionReport,
    constant_fiber_pipeline,
    real_place_counterexample_report,
)
from qflab.parsing import (
    ALL_PLACES,
    parse_curve,
    parse_form,
    parse_function,
    parse_pfister,
    parse_place,
    parse_rational,
)
from qflab.pfister import MembershipAnswer, QuaternionAlgebra, certify_neighbor, expand, norm_member, ramified_places
from qflab.places import GLOBAL, Field, hilbert_symbol, support_places
from qflab.serialization import provide_json_dumps_func
from qflab.settings import get_json_dumps_module

logger = get_logger(__name__)

EXIT_OK: Final = 0
EXIT_ERROR: Final = 1
EXIT_UNKNOWN: Final = 2


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise CommandLineError(f'{self.prog}: {message}')


@dataclass(frozen=True)
class CommandResult:
    text: str
    payload: Any
    unknown: bool = False


Handler = Callable[[argparse.Namespace], CommandResult]


def _render_bool(value: object) -> str:
    return 'true' if value else 'false'


def _label(field: Field) -> str:
    return 'global' if isinstance(field, str) else str(field)


def _fields(text: str, *forms: DiagonalForm, allow_global: bool = True) -> list[Field]:
    parsed = parse_place(text)
    if parsed == ALL_PLACES:
        places: list[Field] = list(form_support(*forms))
        return [*places, GLOBAL] if allow_global else places
    if parsed == GLOBAL and not allow_global:
        raise CommandLineError('this operation is local, pass --place real, a prime or all')
    return [parsed]  # type: ignore[list-item]


def _per_field(
    fields: list[Field],
    compute: Callable[[Field], Any],
    render: Callable[[Any], str] = _render_bool,
) -> CommandResult:
    results = {_label(field): compute(field) for field in fields}
    if len(fields) == 1:
        [(label, value)] = results.items()
        return CommandResult(render(value), {'place': label, 'result': value})
    text = '\n'.join(f'{label}: {render(value)}' for label, value in results.items())
    return CommandResult(text, {'results': results})


def _qf_invariants(args: argparse.Namespace) -> CommandResult:
    form_invariants = invariants(parse_form(args.form))
    hasse = ' '.join(str(place) for place in form_invariants.hasse) or 'none'
    lines = [
        f'rank {form_invariants.rank}',
        f'disc {form_invariants.disc}',
        f'signature {form_invariants.signature}',
        f'hasse -1 at {hasse}',
    ]
    return CommandResult('\n'.join(lines), form_invariants.to_dict())


def _qf_isotropy(args: argparse.Namespace) -> CommandResult:
    form = parse_form(args.form)
    return _per_field(_fields(args.place, form), lambda field: is_isotropic_over(form, field))


def _qf_isometric(args: argparse.Namespace) -> CommandResult:
    first, second = parse_form(args.first), parse_form(args.second)
    return _per_field(_fields(args.place, first, second), lambda field: is_isometric(first, second, field))


def _render_witt(value: dict[str, Any]) -> str:
    return f'{value["witt_index"]} (anisotropic kernel {value["anisotropic_kernel"] or "0"})'


def _qf_witt(args: argparse.Namespace) -> CommandResult:
    form = parse_form(args.form)
    return _per_field(_fields(args.place, form), lambda field: witt_decompose(form, field).to_dict(), _render_witt)


def _qf_hilbert(args: argparse.Namespace) -> CommandResult:
    a, b = parse_rational(args.a), parse_rational(args.b)
    parsed = parse_place(args.place)
    if parsed == ALL_PLACES:
        fields: list[Field] = list(support_places(a, b))
    else:
        fields = _fields(args.place, allow_global=False)
    return _per_field(fields, lambda field: hilbert_symbol(a, b, field), str)  # type: ignore[arg-type]


def _qf_anisotropic_places(args: argparse.Namespace) -> CommandResult:
    places = anisotropic_places(parse_form(args.form))
    return CommandResult(' '.join(str(place) for place in places), {'places': [str(place) for place in places]})


def _qf_represents(args: argparse.Namespace) -> CommandResult:
    form, value = parse_form(args.form), parse_rational(args.value)
    return _per_field(_fields(args.place, form), lambda field: represents(form, value, field))


def _form_or_pfister(text: str) -> DiagonalForm:
    if text.strip().startswith('<<'):
        return expand(parse_pfister(text))
    return parse_form(text)


def _pf_norm_member(args: argparse.Namespace) -> CommandResult:
    form, value = _form_or_pfister(args.form), parse_rational(args.value)
    ambient = parse_pfister(args.ambient) if args.ambient else None
    verdicts = {
        _label(field): norm_member(form, value, field, ambient=ambient) for field in _fields(args.place, form)
    }
    unknown = any(verdict.answer is MembershipAnswer.UNKNOWN for verdict in verdicts.values())
    if len(verdicts) == 1:
        [(label, verdict)] = verdicts.items()
        text = f'{verdict.answer.value}\n{verdict.reason}'
        return CommandResult(text, {'place': label, 'result': verdict.to_dict()}, unknown=unknown)
    text = '\n'.join(f'{label}: {verdict.answer.value}' for label, verdict in verdicts.items())
    payload = {'results': {label: verdict.to_dict() for label, verdict in verdicts.items()}}
    return CommandResult(text, payload, unknown=unknown)


def _pf_neighbor(args: argparse.Namespace) -> CommandResult:
    neighbor, pfister = parse_form(args.form), parse_pfister(args.pfister)
    certificate = certify_neighbor(neighbor, pfister)
    if certificate is None:
        return CommandResult('false', {'neighbor': False})
    complement = certificate.complement.to_text() if certificate.complement is not None else None
    text = f'true\n{certificate.scale} * {pfister} = {neighbor} + <{complement or ""}>'
    return CommandResult(text, {'neighbor': True, 'scale': certificate.scale, 'complement': complement})


def _pf_ramified(args: argparse.Namespace) -> CommandResult:
    algebra = QuaternionAlgebra.of(parse_rational(args.a), parse_rational(args.b))
    places = [str(place) for place in ramified_places(algebra)]
    return CommandResult(' '.join(places), {'algebra': str(algebra), 'ramified': places})


def _curve_divisor(args: argparse.Namespace) -> CommandResult:
    curve = parse_curve(args.curve)
    element = parse_function(args.fn, curve)
    divisor = curve.principal_divisor(element)
    return CommandResult(str(divisor), {'curve': curve.to_text(), 'function': str(element), **divisor.to_dict()})


def _hasse_delta_image(args: argparse.Namespace) -> CommandResult:
    form, curve = parse_form(args.form), parse_curve(args.curve)
    element = parse_function(args.fn, curve)
    report = delta_image_report(form, element, curve)
    payload = {'form': form.to_text(), 'curve': curve.to_text(), 'function': str(element), **report.to_dict()}
    return CommandResult(report.verdict.value, payload, unknown=report.verdict is DeltaVerdict.UNKNOWN)


def _report_result(report: ObstructionReport) -> CommandResult:
    return CommandResult(report.to_text(), report.to_dict(), unknown=report.verdict is GlobalVerdict.UNKNOWN)


def _hasse_check(args: argparse.Namespace) -> CommandResult:
    form, curve = parse_form(args.form), parse_curve(args.curve)
    instance = FibrationInstance(form, curve)
    candidate = ChowClassCandidate.from_function(instance, parse_function(args.fn, curve))
    return _report_result(constant_fiber_pipeline(instance, candidate, real_sign=args.real_sign))


def _hasse_counterexample(_: argparse.Namespace) -> CommandResult:
    return _report_result(real_place_counterexample_report())


def _common_options() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='print the result as JSON')
    common.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING, ... (default QFLAB_LOG_LEVEL)')
    common.add_argument('--log-format', choices=('text', 'json'), default=None, help='stderr log format')
    return common


def _add_command(
    group: 'argparse._SubParsersAction[ArgumentParser]',
    name: str,
    handler: Handler,
    help_text: str,
    common: ArgumentParser,
    aliases: Sequence[str] = (),
) -> ArgumentParser:
    command = group.add_parser(name, help=help_text, parents=[common], aliases=list(aliases))
    command.set_defaults(handler=handler)
    return command


def _place_option(command: ArgumentParser, default: str) -> None:
    command.add_argument('--place', default=default, help=f'real | <prime> | global | all (default {default})')


def build_parser() -> ArgumentParser:
    common = _common_options()
    parser = ArgumentParser(prog='qflab', description='Quadratic forms over Q and local-global checks.')
    areas = parser.add_subparsers(dest='area', required=True, parser_class=ArgumentParser)

    qf = areas.add_parser('qf', help='diagonal quadratic forms, e.g. 1,-2,3,-6').add_subparsers(
        dest='verb', required=True, parser_class=ArgumentParser
    )
    command = _add_command(qf, 'invariants', _qf_invariants, 'rank, discriminant, signature, Hasse invariants', common)
    command.add_argument('form')
    command = _add_command(qf, 'isotropy', _qf_isotropy, 'isotropy over R, Q_p or Q', common)
    command.add_argument('form')
    _place_option(command, ALL_PLACES)
    command = _add_command(qf, 'isometric', _qf_isometric, 'isometry of two forms', common)
    command.add_argument('first')
    command.add_argument('second')
    _place_option(command, 'global')
    command = _add_command(qf, 'witt', _qf_witt, 'Witt index and anisotropic kernel', common)
    command.add_argument('form')
    _place_option(command, 'global')
    command = _add_command(qf, 'hilbert', _qf_hilbert, 'Hilbert symbol (a, b)_v', common)
    command.add_argument('a')
    command.add_argument('b')
    _place_option(command, ALL_PLACES)
    command = _add_command(qf, 'anisotropic-places', _qf_anisotropic_places, 'places where q is anisotropic', common)
    command.add_argument('form')
    command = _add_command(qf, 'represents', _qf_represents, 'does q represent the value', common)
    command.add_argument('form')
    command.add_argument('value')
    _place_option(command, 'global')

    pf = areas.add_parser('pf', help='Pfister forms and norm groups, e.g. <<-1,-1>>').add_subparsers(
        dest='verb', required=True, parser_class=ArgumentParser
    )
    command = _add_command(pf, 'norm-member', _pf_norm_member, 'membership of x in N_q', common)
    command.add_argument('form', help='<<a,b,...>> or a diagonal form')
    command.add_argument('value')
    command.add_argument('--ambient', default=None, help='Pfister form having `form` as a neighbor')
    _place_option(command, 'global')
    command = _add_command(pf, 'neighbor', _pf_neighbor, 'is the form a Pfister neighbor', common)
    command.add_argument('form')
    command.add_argument('pfister')
    command = _add_command(pf, 'ramified', _pf_ramified, 'ramified places of the quaternion algebra (a, b)', common)
    command.add_argument('a')
    command.add_argument('b')

    curve = areas.add_parser('curve', help='curves y^2 = f(x) and P1').add_subparsers(
        dest='verb', required=True, parser_class=ArgumentParser
    )
    command = _add_command(curve, 'divisor', _curve_divisor, 'principal divisor of a function', common)
    command.add_argument('--curve', required=True)
    command.add_argument('--fn', required=True)

    hasse = areas.add_parser('hasse', help='zero-cycles on quadric fibrations').add_subparsers(
        dest='verb', required=True, parser_class=ArgumentParser
    )
    for name, handler, help_text in (
        ('delta-image', _hasse_delta_image, 'is the class of g in the image of delta'),
        ('check', _hasse_check, 'local verdicts and the global conclusion for g'),
    ):
        command = _add_command(hasse, name, handler, help_text, common)
        command.add_argument('--form', required=True)
        command.add_argument('--curve', required=True)
        command.add_argument('--fn', required=True)
    command.add_argument('--real-sign', type=int, choices=(1, -1), default=None)
    _add_command(
        hasse,
        'prop33',
        _hasse_counterexample,
        'a class killed by the real place but not by Q_3',
        common,
        aliases=('counterexample',),
    )
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    overrides: dict[str, Any] = {}
    if args.log_level:
        overrides['level'] = args.log_level.upper()
    if args.log_format:
        overrides['log_format'] = args.log_format
    configure_logging(**overrides)


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CommandLineError as exc:
        sys.stderr.write(f'error: {exc}\n')
        return EXIT_ERROR
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)
    try:
        _configure_logging(args)
        with bind_log_context(command=f'{args.area} {args.verb}'):
            result = args.handler(args)
    except (QflabError, MissingDependencyError, ValueError, ZeroDivisionError) as exc:
        logger.debug('command failed', exc_info=True)
        sys.stderr.write(f'error: {exc}\n')
        return EXIT_ERROR
    if args.json:
        dumps = provide_json_dumps_func(get_json_dumps_module())
        sys.stdout.write(dumps(result.payload, indent=True) + '\n')
    else:
        sys.stdout.write(result.text + '\n')
    return EXIT_UNKNOWN if result.unknown else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == '__main__':
    main()
