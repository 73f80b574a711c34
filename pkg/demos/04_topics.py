"""Fit a small topic model and inspect it.

The sampler is collapsed Gibbs with one RNG stream per document, so the
fit is reproducible bit for bit for a given seed and invariant to the
order the documents arrive in.
"""

from disclosure.lda import fit_lda, top_terms, topic_prevalence

# two obvious themes: illness at home, panic buying
DOCS = [
    ["fever", "cough", "sick", "bed"],
    ["cough", "fever", "doctor"],
    ["sick", "bed", "rest", "fever"],
    ["store", "empty", "shelves", "hoarding"],
    ["hoarding", "paper", "store"],
    ["empty", "store", "shelves"],
    ["doctor", "rest", "sick"],
    ["shelves", "paper", "empty", "hoarding"],
]

model = fit_lda(DOCS, k=2, alpha=0.1, beta=0.01, iterations=300, seed=42)

prevalence = topic_prevalence(model)
for topic in range(model.k):
    terms = ", ".join(f"{term} ({prob:.3f})" for term, prob in top_terms(model, topic, 5))
    print(f"topic {topic} (prevalence {prevalence[topic]:.3f}): {terms}")

print()
print("document mixtures (rows sum to 1):")
theta = model.theta()
for i, doc in enumerate(DOCS):
    mix = " ".join(f"{p:.2f}" for p in theta[i])
    print(f"  {' '.join(doc):<32} -> {mix}")

# the same seed reproduces the fit exactly
again = fit_lda(DOCS, k=2, alpha=0.1, beta=0.01, iterations=300, seed=42)
assert (again.topic_word_counts == model.topic_word_counts).all()
print("\nrefit with the same seed: identical counts")
