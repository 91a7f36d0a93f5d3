"""Build a certificate, write it, tamper with it, and re-check it.

Uses the partial mode (direct solving up to n = 20) so it runs in seconds;
pass --full to run the whole chain of reductions instead.
"""

import json
import sys
import tempfile

from fibthue.pipeline import Config, run_all, verify_certificate

full = "--full" in sys.argv
cert = run_all(Config() if full else Config(max_n=20))
text = cert.dumps()
print(f"certificate: {len(text)} bytes, partial={cert.partial}, exceptions={cert.exceptions()}")
for lo, hi, how in cert.coverage():
    print(f"  [{lo}, {hi}] {how}")

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    fh.write(text)
print("written to", fh.name)

doc = json.loads(text)
print("verification problems:", verify_certificate(doc) or "none")

doc["solved"]["4"]["solutions"][0] = ["1", "1", "1"]
print("after tampering:", verify_certificate(doc))
