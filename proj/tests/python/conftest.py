import os
import sys

# make both the built extension and the source package importable when the
# tests run against the CMake build tree
_here = os.path.dirname(os.path.abspath(__file__))
_root = os.path.dirname(os.path.dirname(_here))
sys.path.insert(0, os.environ.get("FHLAB_BUILD_DIR", os.path.join(_root, "build")))
sys.path.insert(0, os.path.join(_root, "python"))
