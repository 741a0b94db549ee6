"""Plot CSV outputs of the sdisp command line tool.

    python docs/plot_outputs.py simulate run.csv -o run.png
    python docs/plot_outputs.py periodic orbit.csv -o orbit.png
    python docs/plot_outputs.py sweep grid.csv -o grid.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def plot_profiles(df, value, time, ax, title):
    times = sorted(df[time].unique())
    step = max(1, len(times) // 8)
    cmap = plt.get_cmap("viridis")
    for k, t in enumerate(times[::step]):
        cut = df[df[time] == t]
        ax.plot(cut["x"], cut[value], color=cmap(k / max(1, len(times[::step]) - 1)),
                label=f"t = {t:.3g}")
    ax.set_xlabel("x")
    ax.set_ylabel(value)
    ax.set_title(title)
    ax.legend(fontsize="small")


def plot_sweep(df, ax):
    pivot = df.pivot(index="delta", columns="rho", values="lambda_p_omega")
    # Diverging colours centred on the extinction/persistence threshold.
    lim = max(abs(pivot.values.min()), abs(pivot.values.max()))
    im = ax.imshow(pivot.values, origin="lower", cmap="coolwarm", aspect="auto",
                   vmin=-lim, vmax=lim)
    ax.set_xticks(range(len(pivot.columns)), [f"{r:g}" for r in pivot.columns])
    ax.set_yticks(range(len(pivot.index)), [f"{d:g}" for d in pivot.index])
    for (i, d) in enumerate(pivot.index):
        for (j, r) in enumerate(pivot.columns):
            row = df[(df["delta"] == d) & (df["rho"] == r)].iloc[0]
            mark = "" if row["agree"] in (1, "1", True, "true") else " !"
            ax.text(j, i, f"{row['observed']}{mark}", ha="center", va="center", fontsize=8)
    ax.set_xlabel("rho")
    ax.set_ylabel("delta")
    ax.set_title("lambda_p_omega and observed fate")
    plt.colorbar(im, ax=ax)


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("kind", choices=["simulate", "periodic", "sweep"])
    parser.add_argument("csv")
    parser.add_argument("-o", "--out", default="plot.png")
    args = parser.parse_args()

    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if args.kind == "simulate":
        plot_profiles(df, "u", "t", ax, "population snapshots")
    elif args.kind == "periodic":
        plot_profiles(df, "U", "t", ax, "periodic orbit over one period")
    else:
        plot_sweep(df, ax)
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)


if __name__ == "__main__":
    main()
