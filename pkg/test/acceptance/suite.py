#! /usr/bin/env python3

import os
import tempfile
from qkz_engines import suite
from qkz_engines._suite.runconf import RunConfig

CONFIGS = [
    {'z': '0,1', 'a_imag': '13/10,6/5', 'suite': 'qdet,classical-det,qkz,flatness,limits,reduction-roundtrip'},
    {'z': '0,1,5/2', 'a_imag': '13/10,6/5,27/20', 'suite': 'qdet,qkz,flatness,limits,reduction-roundtrip'},
    {'z': '0,1,5/2,4', 'a_imag': '13/10,6/5,27/20,7/5', 'suite': 'qdet,flatness'},
    {'n': 4, 'seed': 11, 'suite': 'qdet,flatness,reduction-roundtrip'},
    {'suite': 'barnes'},
]
# qdet at three parameter points for n = 2, 3 and flatness at five random points for n = 3
CONFIGS += [{'n': n, 'seed': seed, 'suite': 'qdet,flatness'} for n in (2, 3) for seed in (1, 2)]
CONFIGS += [{'n': 3, 'seed': seed, 'suite': 'flatness'} for seed in (3, 4, 5)]


def run(data: dict, directory: str):
    print(f"Running {data['suite']}, this might take a few minutes...")
    config = RunConfig.from_dict({**data, 'output': directory})
    bundle = suite.run_suite(config)
    suite.emit_csv(bundle, directory)
    bundle.to_result().dump()
    reloaded = suite.load_bundle(directory)
    if len(reloaded.reports) != len(bundle.reports):
        raise RuntimeError("Report bundle could not be read back")
    return bundle.passed()


if __name__ == '__main__':
    print("Running suite acceptance tests")
    failed = 0
    for index, data in enumerate(CONFIGS):
        with tempfile.TemporaryDirectory() as directory:
            if not run(data, os.path.join(directory, str(index))):
                failed += 1
    print("failed configurations", failed)
    if failed:
        raise RuntimeError("Acceptance test failed")
