#!/usr/bin/env python3
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
"""
csort solves the assignment of workers to jobs when mismatch costs are
concave in the skill gap, recovers wages from the optimal assignment and
reports within-occupation wage dispersion.
"""
import signal
import sys

import setproctitle

from csort.cli import run

if __name__ == "__main__":
    setproctitle.setproctitle("csort")

    # Allow CTRL+C to abort long verification runs
    signal.signal(signal.SIGINT, signal.SIG_DFL)

    sys.exit(run(sys.argv[1:]))
