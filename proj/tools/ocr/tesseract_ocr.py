#!/usr/bin/env python3
# Copyright 2026 The lurescan Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""OCR adapter for lurescan: prints the text of one image on stdout.

Usage: tesseract_ocr.py IMAGE

Environment:
  TESSDATA_PREFIX  directory holding *.traineddata (default /opt/tessdata)
  MDL_OCR_LANGS    tesseract language list, e.g. "eng+ell" (default eng)
"""

import os
import sys


def main(argv):
    if len(argv) != 2:
        print("usage: tesseract_ocr.py IMAGE", file=sys.stderr)
        return 2
    try:
        import tesserocr
        from PIL import Image
    except ImportError as exc:
        print(f"tesserocr unavailable: {exc}", file=sys.stderr)
        return 127
    tessdata = os.environ.get("TESSDATA_PREFIX", "/opt/tessdata")
    langs = os.environ.get("MDL_OCR_LANGS", "eng")
    try:
        with Image.open(argv[1]) as image, tesserocr.PyTessBaseAPI(path=tessdata, lang=langs) as api:
            api.SetImage(image.convert("L"))
            text = api.GetUTF8Text()
    except (OSError, RuntimeError) as exc:
        print(f"ocr failed: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
