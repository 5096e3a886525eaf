"""Forest uplift under zero coupling as the world grows.

With beta = 0 the conflict features carry no signal about phases, so any
uplift is an artefact of the learner. Larger worlds give tighter estimates.
--sklearn repeats the comparison with scikit-learn's forest as a cross-check.
"""
import argparse

import numpy as np

from fsconflict.predict import ForestConfig, build_dataset, class_weights, run_models, temporal_split
from fsconflict.predict import CONFLICT_FEATURES, default_cutoff, sample_weights
from fsconflict.synth import generate, planted_config
from uplift_study import fused_direct


def sklearn_uplift(fused, n_trees, seed):
    from sklearn.ensemble import RandomForestClassifier

    full = build_dataset(fused, with_conflict=True)
    train, test = temporal_split(full, default_cutoff(full.periods))
    out = []
    for ds_tr, ds_te in ((train.drop_features(CONFLICT_FEATURES), test.drop_features(CONFLICT_FEATURES)),
                         (train, test)):
        rf = RandomForestClassifier(n_estimators=n_trees, class_weight="balanced", random_state=seed,
                                    max_features="sqrt", n_jobs=-1)
        rf.fit(ds_tr.X, ds_tr.y)
        out.append(float(np.mean(rf.predict(ds_te.X) == ds_te.y)))
    return out[1] - out[0]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--countries", type=int, nargs="+", default=[6, 12, 24])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--n-trees", type=int, default=200)
    ap.add_argument("--sklearn", action="store_true")
    args = ap.parse_args(argv)

    for nc in args.countries:
        ours, sk = [], []
        for s in range(args.seeds):
            world = generate(planted_config(s, 0.0, n_countries=nc), with_fs=False)
            fused = fused_direct(world)
            res = run_models(fused, models=("forest",), forest=ForestConfig(n_trees=args.n_trees))
            acc = {r.index: r.metrics.accuracy for r in res.rows}
            # forest rows: CHS first, then with conflict features
            chs, conf = sorted(i for i in acc if i > 3)
            ours.append(100 * (acc[conf] - acc[chs]))
            if args.sklearn:
                sk.append(100 * sklearn_uplift(fused, args.n_trees, s))
        line = (f"countries={nc:3d} districts={nc * 12:4d}  uplift {np.mean(ours):+.2f}pp "
                f"(se {np.std(ours, ddof=1) / np.sqrt(len(ours)):.2f})")
        if sk:
            line += f"  sklearn {np.mean(sk):+.2f}pp (se {np.std(sk, ddof=1) / np.sqrt(len(sk)):.2f})"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
