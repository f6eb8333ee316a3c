//! Published critical values and empirical sizes used as reference data.
//! Columns follow `nbue::tables::DEFAULT_ALPHAS`.

#![allow(dead_code, clippy::approx_constant)]

/// Scaled critical values for j = 0.25.
pub const J_QUARTER: [(usize, [f64; 6]); 39] = [
    (2, [0.3679, 0.4233, 0.4919, 1.5944, 1.6635, 1.7184]),
    (3, [-0.2286, 0.0152, 0.1968, 1.6125, 1.7617, 1.9614]),
    (4, [-0.5940, -0.2080, 0.0345, 1.6098, 1.7825, 2.0605]),
    (5, [-0.8368, -0.3566, -0.0848, 1.6121, 1.7992, 2.1120]),
    (6, [-1.0031, -0.4681, -0.1769, 1.6090, 1.8093, 2.1475]),
    (7, [-1.1286, -0.5557, -0.2519, 1.6074, 1.8181, 2.1765]),
    (8, [-1.2310, -0.6334, -0.3162, 1.6019, 1.8202, 2.1964]),
    (9, [-1.3191, -0.6893, -0.3657, 1.5965, 1.8240, 2.2151]),
    (10, [-1.3855, -0.7396, -0.4074, 1.5924, 1.8229, 2.2271]),
    (11, [-1.4484, -0.7912, -0.4522, 1.5905, 1.8286, 2.2393]),
    (12, [-1.4978, -0.8257, -0.4830, 1.5859, 1.8290, 2.2522]),
    (13, [-1.5396, -0.8601, -0.5154, 1.5787, 1.8258, 2.255]),
    (14, [-1.5835, -0.8933, -0.5413, 1.5789, 1.8300, 2.2718]),
    (15, [-1.6115, -0.9210, -0.5679, 1.5742, 1.8274, 2.2754]),
    (16, [-1.6497, -0.9470, -0.5887, 1.5708, 1.8268, 2.279]),
    (17, [-1.6764, -0.9737, -0.6129, 1.5698, 1.8280, 2.2857]),
    (18, [-1.6969, -0.9878, -0.6253, 1.5656, 1.8297, 2.2923]),
    (19, [-1.7223, -1.0073, -0.6436, 1.5619, 1.8270, 2.2982]),
    (20, [-1.7445, -1.0286, -0.6639, 1.5570, 1.8247, 2.2939]),
    (21, [-1.7699, -1.0435, -0.6762, 1.5561, 1.8266, 2.3022]),
    (22, [-1.7829, -1.0599, -0.6908, 1.5541, 1.8250, 2.3083]),
    (23, [-1.8062, -1.0718, -0.7027, 1.5481, 1.8232, 2.3106]),
    (24, [-1.8198, -1.0857, -0.7150, 1.5490, 1.8239, 2.3086]),
    (25, [-1.8289, -1.0981, -0.7266, 1.5432, 1.8195, 2.3094]),
    (30, [-1.8922, -1.1544, -0.7770, 1.5329, 1.8162, 2.3217]),
    (35, [-1.9358, -1.1904, -0.8147, 1.5286, 1.8199, 2.3338]),
    (40, [-1.9729, -1.2264, -0.8448, 1.5174, 1.8120, 2.3390]),
    (45, [-1.9989, -1.2508, -0.8701, 1.5068, 1.8067, 2.3444]),
    (50, [-2.0171, -1.2702, -0.8909, 1.5027, 1.8045, 2.3431]),
    (55, [-2.0348, -1.2917, -0.9085, 1.4935, 1.7990, 2.3469]),
    (60, [-2.0573, -1.3094, -0.9271, 1.4885, 1.7931, 2.3495]),
    (65, [-2.0680, -1.3220, -0.9387, 1.4832, 1.7943, 2.3555]),
    (70, [-2.0788, -1.3363, -0.9541, 1.4809, 1.7933, 2.3567]),
    (75, [-2.1005, -1.3476, -0.9649, 1.4777, 1.7932, 2.3599]),
    (80, [-2.1035, -1.3567, -0.9739, 1.4705, 1.7855, 2.3530]),
    (85, [-2.1138, -1.3681, -0.9861, 1.4690, 1.7843, 2.3593]),
    (90, [-2.1171, -1.3760, -0.9938, 1.4653, 1.7843, 2.3597]),
    (95, [-2.1268, -1.3841, -0.9991, 1.4619, 1.7799, 2.3575]),
    (100, [-2.1342, -1.3947, -1.0106, 1.4553, 1.7753, 2.3588]),
];

/// Scaled critical values for j = 1.
pub const J_ONE: [(usize, [f64; 6]); 39] = [
    (2, [0.0245, 0.1227, 0.2453, 2.2037, 2.3268, 2.4251]),
    (3, [-0.7183, -0.3687, -0.1067, 2.1032, 2.3667, 2.7160]),
    (4, [-1.0564, -0.5720, -0.2714, 2.0028, 2.3050, 2.7862]),
    (5, [-1.2379, -0.7018, -0.3916, 1.9419, 2.2529, 2.7860]),
    (6, [-1.3603, -0.7993, -0.4813, 1.8915, 2.2092, 2.7745]),
    (7, [-1.4492, -0.8711, -0.5456, 1.8544, 2.1788, 2.7598]),
    (8, [-1.5266, -0.9299, -0.5997, 1.8209, 2.1512, 2.7439]),
    (9, [-1.5792, -0.9765, -0.6391, 1.7987, 2.1320, 2.7414]),
    (10, [-1.6260, -1.0158, -0.6772, 1.7712, 2.1117, 2.7255]),
    (11, [-1.6627, -1.0478, -0.7061, 1.7529, 2.0922, 2.7056]),
    (12, [-1.7052, -1.0788, -0.7373, 1.7354, 2.0776, 2.7052]),
    (13, [-1.7329, -1.1002, -0.7569, 1.7176, 2.0608, 2.6893]),
    (14, [-1.7638, -1.1273, -0.7814, 1.7028, 2.0466, 2.6804]),
    (15, [-1.7796, -1.1428, -0.7946, 1.6910, 2.0398, 2.6736]),
    (16, [-1.8005, -1.1593, -0.8133, 1.6821, 2.0296, 2.6716]),
    (17, [-1.8202, -1.1789, -0.8273, 1.6686, 2.0139, 2.6524]),
    (18, [-1.8332, -1.1920, -0.8414, 1.6593, 2.0075, 2.6566]),
    (19, [-1.8522, -1.2067, -0.8545, 1.6496, 1.9980, 2.6526]),
    (20, [-1.8669, -1.2176, -0.8659, 1.6401, 1.9915, 2.6397]),
    (21, [-1.8806, -1.2284, -0.8787, 1.6292, 1.9823, 2.6296]),
    (22, [-1.8933, -1.2432, -0.8892, 1.6261, 1.9773, 2.6284]),
    (23, [-1.8965, -1.2460, -0.8953, 1.6190, 1.9689, 2.6161]),
    (24, [-1.9134, -1.2598, -0.9049, 1.6087, 1.9637, 2.6190]),
    (25, [-1.9258, -1.2684, -0.9138, 1.6051, 1.9584, 2.6052]),
    (30, [-1.9580, -1.3014, -0.9460, 1.5798, 1.9355, 2.5973]),
    (35, [-1.9911, -1.3290, -0.9729, 1.5581, 1.9168, 2.5840]),
    (40, [-2.0147, -1.3521, -0.9944, 1.5427, 1.8994, 2.5681]),
    (45, [-2.0346, -1.3675, -1.0103, 1.5252, 1.8821, 2.5506]),
    (50, [-2.0507, -1.3840, -1.0239, 1.5160, 1.8751, 2.5455]),
    (55, [-2.0636, -1.3933, -1.0333, 1.5046, 1.8651, 2.5332]),
    (60, [-2.0841, -1.4104, -1.0500, 1.4938, 1.8511, 2.5235]),
    (65, [-2.0873, -1.4192, -1.0576, 1.4884, 1.8480, 2.5153]),
    (70, [-2.1029, -1.4283, -1.0668, 1.4797, 1.8419, 2.5156]),
    (75, [-2.1050, -1.4315, -1.0712, 1.4703, 1.8290, 2.5040]),
    (80, [-2.1167, -1.4416, -1.0810, 1.4668, 1.8275, 2.5040]),
    (85, [-2.1211, -1.4476, -1.0857, 1.4639, 1.8255, 2.5003]),
    (90, [-2.1321, -1.4539, -1.0938, 1.4586, 1.8193, 2.4886]),
    (95, [-2.1305, -1.4617, -1.0989, 1.4556, 1.8151, 2.4877]),
    (100, [-2.1407, -1.4615, -1.1022, 1.4466, 1.8088, 2.4839]),
];

/// Empirical size in percent at the 5% level: gamma_1* against its own
/// critical values, gamma_1* against Barlow's points, K* against Barlow's points.
pub const SIZES: [(usize, f64, f64, f64); 9] = [
    (2, 5.25, 55.00, 5.24),
    (3, 5.23, 33.52, 5.29),
    (4, 4.96, 27.09, 4.98),
    (5, 4.99, 22.66, 5.09),
    (6, 4.94, 19.82, 4.82),
    (7, 5.01, 17.73, 5.22),
    (8, 4.90, 16.40, 5.00),
    (9, 4.85, 14.70, 4.83),
    (10, 4.83, 14.90, 4.88),
];
