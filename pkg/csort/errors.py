"""
Exceptions raised by the solver library.

Everything derives from CSortError so callers (and the command line) can
catch library failures in one place. Errors are split in two families:
validation errors are the caller's fault (bad input, bad parameters), while
InternalInvariantViolation means the library produced something it should
never have produced.
"""
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
#
# Copyright (C) 2025 The csort authors
#
from csort.enums import ExitCode


class CSortError(Exception):
    """Base class for every error raised by csort"""
    exit_code = ExitCode.VALIDATION_FAILURE


class ValidationError(CSortError):
    """Input or parameters were rejected"""


class InputError(ValidationError):
    """
    A file could not be read or parsed, or command line flags conflict.
    The message names the offending file, column or flag.
    """


class MassMismatch(ValidationError):
    """Worker and job distributions do not carry the same total mass"""


class PreconditionViolated(ValidationError):
    """An operation was called on data that breaks its stated preconditions"""


class DomainError(ValidationError):
    """A parameter or skill lies outside the domain of a function"""


class InvalidCost(ValidationError):
    """A cost schedule is not convex and strictly decreasing"""


class InvestmentUndefined(ValidationError):
    """No optimal investment exists for a perfectly matched pair"""


class InvalidAssignment(ValidationError):
    """An assignment has crossing pairs or does not fit its economy"""


class InstanceTooLarge(ValidationError):
    """A brute force oracle was asked to solve more units than it allows"""


class ParamError(ValidationError):
    """Generator parameters are out of range or cannot be made exact"""


class CalibrationError(ValidationError):
    """A wage percentile table is not usable for calibration"""


class InternalInvariantViolation(CSortError):
    """
    The library broke one of its own guarantees, for example an infeasible
    level-shift system built from a supposedly optimal assignment.
    """
    exit_code = ExitCode.INVARIANT_VIOLATION
