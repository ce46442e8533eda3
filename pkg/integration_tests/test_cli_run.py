import sys
import os
import json
import logging
# Add project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from main import main

# Set up logging
logger = logging.getLogger(__name__)

TINY = [
    '--set', 'synth_classes=8', '--set', 'synth_per_class=20', '--set', 'synth_image_size=16',
    '--set', 'synth_train_classes=3', '--set', 'epochs=2', '--set', 'lr_decay_epochs=1',
    '--set', 'batch_size=16', '--set', 'transform_preset=m4', '--set', 'loss.negatives_per_batch=32',
    '--set', 'num_tasks=20',
]


def test_train_eval_embed_from_command_line(tmp_path, caplog):
    """train, eval and embed run end to end from a config file plus overrides"""
    caplog.set_level(logging.INFO)
    config_path = tmp_path / 'run.cfg'
    config_path.write_text('# tiny run\nrecipe=desk\ngenerations=2\n')
    common = ['--config', str(config_path), '--output-dir', str(tmp_path / 'run')] + TINY

    assert main(common + ['prepare-data']) == 0
    assert main(common + ['train', '--eval-each-generation']) == 0
    checkpoint = str(tmp_path / 'run' / 'generation_1.ckpt')
    assert os.path.exists(checkpoint)

    assert main(common + ['eval', checkpoint, '--shots', '1,5']) == 0
    with open(tmp_path / 'run' / 'eval_5way_5shot.json') as handle:
        report = json.load(handle)
    logger.info("5-way 5-shot: %s", report['summary'])
    assert report['num_tasks'] == 20
    assert 'generations=2' in report['config']

    assert main(common + ['embed', checkpoint, '--out', str(tmp_path / 'run' / 'test.csv'),
                          '--max-images', '50']) == 0
    assert (tmp_path / 'run' / 'test.pca.csv').exists()


def test_resume_from_command_line(tmp_path):
    """A finished generation 0 checkpoint resumes into generation 1"""
    common = ['--output-dir', str(tmp_path), '--set', 'generations=2'] + TINY
    assert main(common + ['--set', 'generations=1', 'train']) == 0
    assert main(common + ['train', '--resume', str(tmp_path / 'generation_0.ckpt')]) == 0
    assert os.path.exists(tmp_path / 'generation_1.ckpt')
