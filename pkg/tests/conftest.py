from fuzzcyl.functions import polynomial


def random_supported(rng, carrier, support=None, max_degree=2):
    n = int(rng.integers(1, max_degree + 2))
    coeffs = [complex(rng.normal(), rng.normal()) for _ in range(n)]
    return polynomial(coeffs, carrier, support=support)


def random_cp_element(alg, rng, max_step=2, n_terms=3):
    terms = {}
    for _ in range(n_terms):
        n = int(rng.integers(-max_step, max_step + 1))
        if alg.interval_n(n).is_empty:
            continue
        f = random_supported(rng, alg.carrier, support=alg.interval_n(n))
        terms[n] = terms[n] + f if n in terms else f
    return alg.element(terms)
