import json
import sys

import pytest
from pytest_mock import MockerFixture

from qflab.cli import EXIT_ERROR, EXIT_OK, EXIT_UNKNOWN, main, run

THREE_ROOTS = 'y^2 = -x^3 - 5*x^2 - 6*x'


@pytest.mark.parametrize(
    ('argv', 'expected'),
    [
        (['qf', 'anisotropic-places', '1,-2,3,-6'], '2 3'),
        (['qf', 'isometric', '1,1,3,3', '1,-2,3,-6', '--place', '3'], 'true'),
        (['qf', 'isometric', '1,1,3,3', '1,-2,3,-6'], 'false'),
        (['qf', 'isotropy', '1,-2,3,-6'], 'real: true\n2: false\n3: false\nglobal: false'),
        (['qf', 'hilbert', '2', '3'], 'real: 1\n2: -1\n3: -1'),
        (['qf', 'hilbert', '5', '7', '--place', '11'], '1'),
        (['qf', 'represents', '1,1', '3', '--place', '5'], 'true'),
        (['pf', 'ramified', '2', '3'], '2 3'),
        (['curve', 'divisor', '--curve', THREE_ROOTS, '--fn', 'x'], '2*(0,0) - 2*(inf)'),
        (['curve', 'divisor', '--curve', 'P1', '--fn', '(x^2+1)/x'], '-(0) + [x^2 + 1] - (inf)'),
        (['hasse', 'delta-image', '--form', '1,1,1,1', '--curve', THREE_ROOTS, '--fn', 'x'], 'InImage'),
    ],
)
def test_commands(argv: list[str], expected: str, capsys: pytest.CaptureFixture[str]) -> None:
    assert run(argv) == EXIT_OK
    assert capsys.readouterr().out == f'{expected}\n'


def test_pfister_neighbor(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(['pf', 'neighbor', '5,-10,15', '<<-2,3>>']) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == 'true'
    assert run(['pf', 'neighbor', '1,1,1', '<<-2,3>>']) == EXIT_OK
    assert capsys.readouterr().out == 'false\n'


def test_counterexample_as_json(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(['hasse', 'prop33', '--json']) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert list(payload) == ['instance', 'candidate', 'places', 'global', 'assumed_facts', 'steps', 'support']
    assert payload['global']['verdict'] == 'RealMapNotInjective'
    assert payload['global']['hasse_principle'] is True
    assert payload['support'] == ['2', '3']
    assert list(payload['places'][0]) == ['place', 'verdict', 'certificate-kind', 'machine_verified']
    assert [place['certificate-kind'] for place in payload['places']] == [None, None, 'ExternalFact']
    assert len(payload['assumed_facts']) == 1


def test_counterexample_alias(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(['hasse', 'prop33']) == EXIT_OK
    text = capsys.readouterr().out
    assert run(['hasse', 'counterexample']) == EXIT_OK
    assert capsys.readouterr().out == text
    assert text.endswith('verdict: RealMapNotInjective\n')


def test_exponent_limit_is_an_error(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(['curve', 'divisor', '--curve', 'P1', '--fn', 'x^999999999']) == EXIT_ERROR
    assert 'exponent larger than 64' in capsys.readouterr().err


def test_curve_divisor_as_json(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(['curve', 'divisor', '--curve', THREE_ROOTS, '--fn', 'y', '--json']) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload['divisor'] == '(0,0) + (-2,0) + (-3,0) - 3*(inf)'
    assert payload['degree'] == 0
    assert payload['function'] == 'y'


def test_check_finds_a_witness(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(['hasse', 'check', '--form', '1,1,1,1', '--curve', 'P1', '--fn', 'x^2+1']) == EXIT_OK
    output = capsys.readouterr().out
    assert output.endswith('verdict: ClassZero\n')
    assert '(witness) verified' in output


@pytest.mark.parametrize(
    'argv',
    [
        ['hasse', 'delta-image', '--form', '1,-2,3,-6', '--curve', 'P1', '--fn', 'x^2+1'],
        ['hasse', 'check', '--form', '1,-2,3,-6', '--curve', THREE_ROOTS, '--fn', 'x'],
        ['pf', 'norm-member', '1,1,1', '2'],
    ],
)
def test_unknown_answers_exit_with_two(argv: list[str], capsys: pytest.CaptureFixture[str]) -> None:
    assert run(argv) == EXIT_UNKNOWN
    assert capsys.readouterr().out


def test_parse_error_shows_a_caret(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(['qf', 'invariants', '1,0,3']) == EXIT_ERROR
    captured = capsys.readouterr()
    assert not captured.out
    assert captured.err == 'error: entries must be nonzero at position 2\n  1,0,3\n    ^\n'


@pytest.mark.parametrize(
    ('argv', 'message'),
    [
        (['qf', 'frobnicate', '1'], 'invalid choice'),
        (['qf', 'invariants'], 'the following arguments are required'),
        (['qf', 'hilbert', '2', '3', '--place', 'global'], 'this operation is local'),
        (['curve', 'divisor', '--curve', 'y^2 = x^2+1', '--fn', 'x'], 'degree >= 3'),
        (['hasse', 'check', '--form', '1,1', '--curve', 'P1', '--fn', 'x'], 'rank 3 or 4'),
        (['pf', 'norm-member', '1,1', '0'], 'nonzero'),
    ],
)
def test_errors_exit_with_one(argv: list[str], message: str, capsys: pytest.CaptureFixture[str]) -> None:
    assert run(argv) == EXIT_ERROR
    assert message in capsys.readouterr().err


def test_logs_go_to_stderr(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ['hasse', 'check', '--form', '1,1,1,1', '--curve', 'P1', '--fn', 'x^2+1']
    assert run([*argv, '--log-level', 'info', '--log-format', 'json']) == EXIT_OK
    captured = capsys.readouterr()
    records = [json.loads(line) for line in captured.err.splitlines()]
    assert {record['message'] for record in records} >= {'proof step'}
    assert 'proof step' not in captured.out
    steps = [record for record in records if record['message'] == 'proof step']
    assert {record['command'] for record in steps} == {'hasse check'}


def test_help_exits_cleanly(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(['--help']) == EXIT_OK
    assert 'usage: qflab' in capsys.readouterr().out


def test_main_uses_sys_argv(mocker: MockerFixture, capsys: pytest.CaptureFixture[str]) -> None:
    mocker.patch.object(sys, 'argv', ['qflab', 'pf', 'ramified', '-1', '-1'])
    with pytest.raises(SystemExit) as exc_info:
        main()
    assert exc_info.value.code == EXIT_OK
    assert capsys.readouterr().out == 'real 2\n'
