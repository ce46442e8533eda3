from .command_handlers import (
    handle_dump_transforms,
    handle_prepare_data,
    handle_train,
    handle_eval,
    handle_ablate,
    handle_sweep,
    handle_embed
)

# Map subcommands to their handlers
HANDLERS = {
    'dump-transforms': handle_dump_transforms,
    'prepare-data': handle_prepare_data,
    'train': handle_train,
    'eval': handle_eval,
    'ablate': handle_ablate,
    'sweep': handle_sweep,
    'embed': handle_embed
}
