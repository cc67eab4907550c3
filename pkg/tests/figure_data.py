"""Tabulated curve data of the published figures (theory and simulation)."""

ALPHAS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

# N_w = N_u = 25, V_th = [0.6, 0.9], lambda = 0.025
FIG3_THEORY = {
    "gamma_w": {
        25: (0.0244868834947786, 0.032679271749433, 0.0439423030237447,
             0.0596586844634698, 0.0815725357424052, 0.111582498753892),
        50: (0.131461353436132, 0.188867650462157, 0.260769229361492,
             0.353679022405222, 0.467655601225398, 0.591556390534104),
        75: (0.364144503559581, 0.480065819070288, 0.583591116712246,
             0.693496884612498, 0.802817829768053, 0.889450380459957),
    },
    "gamma_u": {
        25: (0.482492822070495, 0.419041447764938, 0.339867235609827,
             0.243676742876929, 0.130110326505547, 1.63737713059082e-07),
        50: (0.692986576136105, 0.631237780778263, 0.528742871986483,
             0.383149899557559, 0.201836273015811, 2.68100386778181e-14),
        75: (0.846370319522698, 0.801588873765624, 0.691990723148563,
             0.505246924312328, 0.260783564397036, 4.38981442013142e-21),
    },
    "e_tot": {
        25: (0.0232827642654975, 0.021404985175303, 0.0200814099672573,
             0.0192358301020755, 0.0187925726352417, 0.0186781620414106),
        50: (0.0400647562897423, 0.0320630663099675, 0.0274183958139315,
             0.0250324095923142, 0.024038959831378, 0.023820429045878),
        75: (0.0517134436036729, 0.035985725807388, 0.028847320409736,
             0.0260405575110342, 0.0251495812235178, 0.0249953976273937),
    },
}

FIG3_SIM = {
    "gamma_w": {
        25: (0.02458, 0.0321, 0.04262, 0.06078, 0.0806, 0.10996),
        50: (0.1341, 0.18708, 0.26038, 0.35462, 0.46726, 0.59376),
        75: (0.36, 0.48138, 0.57926, 0.69028, 0.80584, 0.88994),
    },
}

# L = 50, V_th = [0.94, 0.98], gamma_th = 0.8; keyed by N_u then N_w
FIG4_NW = (5, 15, 25, 35, 45)
FIG4_COWU = {
    15: (0.05, 0.05, 0.05, 0.05, 0.04),
    25: (0.03, 0.03, 0.025, 0.02, 0.01),
    35: (0.015, 0.015, 0.015, 0.01, 0.005),
}
FIG4_RR = {
    15: (0.05, 0.02, 0.0, 0.0, 0.0),
    25: (0.02, 0.01, 0.0, 0.0, 0.0),
    35: (0.01, 0.005, 0.0, 0.0, 0.0),
}

# N_w = N_u = 25, L = 50, gamma_th = 0.8; lambda -> (alpha_opt, eta); absent = infeasible
FIG5_LAMBDAS = (0.005, 0.01, 0.015, 0.02, 0.025)
FIG5 = {
    (0.94, 0.98): {
        0.005: (0.35, 0.625749132016461),
        0.01: (0.25, 0.68216232227729),
        0.015: (0.2, 0.737240822687484),
        0.02: (0.1, 0.853491823509066),
        0.025: (0.05, 0.96893011820783),
    },
    (0.93, 0.99): {
        0.005: (0.35, 0.953103877380311),
        0.01: (0.25, 1.03950544530316),
        0.015: (0.15, 1.18068538653918),
    },
    (0.92, 1.0): {
        0.005: (0.35, 1.29045285511167),
        0.01: (0.25, 1.40805919935895),
    },
}
