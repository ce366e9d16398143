"""Run every registered verifier on its small instances."""

from cdmgraph import lemmas

failed = 0
for rep in lemmas.verify_many("all", "small"):
    print(rep.line())
    failed += rep.status == lemmas.FAIL
print(f"{failed} failing reports")
