"""
For creating a standalone build using cx_Freeze.
For maintainer use only.

It is not needed to run the solver from the repository.
A plain install (e.g. ``pip install -e .``) packages the library with setuptools.
"""
import sys

from csort import VERSION

FREEZE_COMMANDS = {"build_exe", "bdist_msi", "bdist_mac", "bdist_dmg", "bdist_appimage"}

if FREEZE_COMMANDS.intersection(sys.argv[1:]):
    from cx_Freeze import Executable, setup

    build_exe_options = {
        "build_exe": "dist",
        "excludes": [
            "email",
            "tcl",
            "tk",
            "tkinter",
            "xml",
        ],
        "packages": ["numpy", "scipy.optimize", "PIL"],
        "optimize": "2",
    }

    setup(
        name="csort",
        version=VERSION,
        description="Optimal assignment with concave mismatch costs",
        options={"build_exe": build_exe_options},
        executables=[Executable("csort_solver.py", base=None, target_name="csort")],
    )
else:
    from setuptools import find_packages, setup

    setup(
        name="csort",
        version=VERSION,
        description="Optimal assignment with concave mismatch costs",
        packages=find_packages(include=["csort", "csort.*"]),
        py_modules=["csort_solver"],
        install_requires=["numpy", "Pillow", "scipy", "setproctitle"],
    )
