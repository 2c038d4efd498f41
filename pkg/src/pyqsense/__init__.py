"""A package of Python modules, used to simulate and analyze single-qubit quantum sensors.

.. moduleauthor:: David Banas <capn.freako@gmail.com>

Original Author: David Banas <capn.freako@gmail.com>

Original Date:   18 October 2026

Copyright (c) 2026 by David Banas; All rights reserved World wide.
"""

from importlib.metadata import version as _get_version

# Set PEP396 version attribute
try:
    __version__ = _get_version("PyQSense")
except Exception as err:  # pylint: disable=broad-exception-caught
    __version__ = f"{err} (dev)"

__date__ = "October 18, 2026"
__authors__ = "David Banas"
__copy__ = "Copyright (c) 2026 David Banas"
