# constants.py

# Geometric transformation family
TRANSFORM_PRESETS = ['m3', 'm4', 'm8', 'm12', 'm16', 'm20', 'm24', 'affine972']
DEFAULT_TRANSFORM_PRESET = 'm16'
AFFINE_SUBSET_SIZE = 10  # transforms drawn from affine972 per run

# Model
BACKBONES = ['conv4-tiny', 'conv4', 'resnet12-lite']
DEFAULT_BACKBONE = 'conv4-tiny'
DEFAULT_EMBED_DIM = 64
INVARIANT_DIM = 64  # D, width of the memory-bank slots

# Losses
CONTRAST_TEMPERATURE = 1.0  # tau
KD_TEMPERATURE = 4.0
LOSS_COEFFICIENT = 1.0
NEGATIVES_PER_BATCH = 6400

# Memory bank
BANK_MOMENTUM = 0.5

# Optimisation (CIFAR-FS / miniImageNet recipe)
LEARNING_RATE = 0.05
SGD_MOMENTUM = 0.9
WEIGHT_DECAY = 5e-4
BATCH_SIZE = 64
LR_DECAY_FACTOR = 0.1

# Few-shot evaluation
NUM_TASKS = 600
QUERY_PER_CLASS = 15
LOGREG_C = 1.0
LOGREG_TOL = 1e-6
LOGREG_MAX_ITER = 1000
CI95_Z = 1.96

# Data augmentation
CROP_PADDING = 4
JITTER_STRENGTH = 0.4  # brightness/contrast/saturation factors in [0.6, 1.4]

# File formats
CHECKPOINT_FORMAT_VERSION = 1
CHECKPOINT_MAGIC = b'EQINVCK1'
CIFAR_RECORD_BYTES = 3074
CIFAR_IMAGE_SIDE = 32

# Exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_NUMERIC_ABORT = 4
