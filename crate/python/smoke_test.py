"""Smoke test for the Python bindings.

Build and install first, e.g. `pip install crates/py` or
`maturin develop -m crates/py/Cargo.toml`, then run this file.
"""

import json

from obspace import BasisSystem, ObservationSpace, Scalar


def main():
    half = Scalar("1/2")
    r2 = Scalar.sqrt2()
    assert half + half == 1
    assert r2 * r2 == 2
    assert str(Scalar("1/4") * (1 - r2)) == "1/4-1/4*sqrt2"
    assert (1 - r2).sign() == -1
    assert abs(float(r2) - 2 ** 0.5) < 1e-12

    piponi = ObservationSpace.scenario("piponi")
    assert piponi.outcomes == ["00", "01", "10", "11"]
    signed = piponi.extend("signed")
    assert signed.status == "unique"
    assert dict(signed.witness) == {"00": "-1/2", "01": "1/2", "10": "1/2", "11": "1/2"}
    trad = piponi.extend("traditional")
    assert not trad.feasible and trad.certificate_valid

    bell = ObservationSpace.scenario("bell", (0, 2, 3))
    witness = dict(bell.extend("signed").witness)
    assert bell.is_extended_by(witness)
    q36 = Scalar(witness["+-+"]) + Scalar(witness["-+-"])
    assert q36 == Scalar("1/4") * (1 - r2)
    flip = "(+++,---)(++-,--+)(+-+,-+-)(+--,-++)"
    assert bell.is_automorphism(flip)
    r = bell.symmetrize(witness, [flip])
    eighth = Scalar("1/8")
    assert r["+-+"] == eighth * (1 - r2)
    assert r["+--"] == eighth * (1 + r2)
    assert r["+++"] == eighth
    assert bell.extend("min-negativity").negative_mass == "-1/4+1/4*sqrt2"
    assert ObservationSpace.from_json(bell.to_json()).to_json() == bell.to_json()

    assert ObservationSpace.scenario("hardy").extend("traditional").feasible
    hidden = ObservationSpace.scenario("hardy-hidden")
    assert not hidden.extend("traditional").feasible
    assert hidden.extend("signed").feasible

    ks = BasisSystem.cabello()
    report = json.loads(ks.report())
    assert report["distinct_rays"] == 18 and report["cabello_profile"]
    assert ks.parity() == "obstruction"
    assert ks.selections() == []
    assert not ks.model_exists()

    try:
        ObservationSpace.scenario("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown scenario accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
