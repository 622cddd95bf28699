"""
Example: Batch construction over several target dimensions
"""

from pathlib import Path

import pandas as pd

from ldpc_secure_sketch import SecureSketchExperiment
from ldpc_secure_sketch.sketch import code_stats


def main():
    # One response, reused for every code
    exp = SecureSketchExperiment()
    print("Drawing a length-128 response...")
    exp.setup_response(n=128, seed=1)

    # Dimensions to study
    target_dims = [13, 28, 42, 56, 70]

    output_dir = Path('./batch_results')
    summary_data = []

    for target_k in target_dims:
        print(f"\n{'='*50}")
        print(f"Constructing code with target k={target_k}...")
        print(f"{'='*50}")

        try:
            code = exp.construct_code(target_k=target_k, seed=1)
            exp.save_code(output_dir / f"n128_k{target_k}.mtx")

            # Short curve at a single operating point
            curves = exp.simulate(p_grid=[0.01], i_max=8, trials=500, m_readouts=3,
                                  seed=1, verbose=False)

            stats = code_stats(code)
            summary_data.append({
                'target_k': target_k,
                'k': stats['k'],
                'rows': stats['rows'],
                'density': stats['density'],
                'col_weight_spread': stats['col_weight_spread'],
                'p_block@0.01': curves['p_block'].iloc[0],
            })

            print(f"✅ k={target_k} construction completed")

        except Exception as e:
            print(f"❌ k={target_k} construction failed: {e}")
            continue

    print(f"\n{'='*60}")
    print("BATCH CONSTRUCTION SUMMARY")
    print(f"{'='*60}")

    df = pd.DataFrame(summary_data)
    print(df.to_string(index=False))

    output_dir.mkdir(parents=True, exist_ok=True)
    df.to_csv(output_dir / 'summary.csv', index=False)
    print(f"\nSummary saved to: {output_dir / 'summary.csv'}")


if __name__ == '__main__':
    main()
