"""Chain versus sphere on the small filament layout."""
from exnrule.baselines import KnnConfig, knn_predict
from exnrule.ensemble import ExNRuleConfig, extended_chain, fit, predict
from exnrule.synthgen import filament_layout


def main():
    data, query = filament_layout()
    model = fit(data, ExNRuleConfig(B=1, k=5, feature_rule=data.p, bootstrap=False))
    chain = extended_chain(model.samples[0], data, query, 5)
    print("chain hops:")
    for pos, lab, hop in zip(chain.row_indices, chain.labels, chain.hop_distances):
        print(f"  row {pos:>2} {data.features[pos].tolist()} class {lab} hop {hop:.3f}")
    pr = predict(model, query)
    lab, prob = knn_predict(data, query, KnnConfig(5))
    print(f"chain vote: class {pr.label}, P(class 1) = {pr.prob_class1:.1f}")
    print(f"5-NN vote:  class {lab}, P(class 1) = {prob:.1f}")


if __name__ == "__main__":
    main()
