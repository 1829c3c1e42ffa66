"""Fine-tune a pretrained sequence classifier on a ctxwin dataset."""

from __future__ import annotations

import random
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import DataLoader, TensorDataset
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .config import AdapterConfig
from .data import LABELS, LABEL_TO_INDEX, build_input_text, load_examples
from .metrics import confusion_matrix, metrics_dict, write_metrics


def _set_seeds(seed: int) -> None:
    # deterministic up to accelerator nondeterminism; CPU runs reproduce
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    if torch.cuda.is_available():
        torch.cuda.manual_seed_all(seed)


def _device(name: str) -> torch.device:
    if name == "auto":
        return torch.device("cuda" if torch.cuda.is_available() else "cpu")
    return torch.device(name)


def _encode(examples, tokenizer, config) -> TensorDataset:
    texts = [build_input_text(ex, config.segment_tags) for ex in examples]
    labels = [LABEL_TO_INDEX[ex["label"]] for ex in examples]
    encoded = tokenizer(
        texts,
        truncation=True,
        max_length=config.max_length,
        padding="max_length",
        return_tensors="pt",
    )
    return TensorDataset(
        encoded["input_ids"], encoded["attention_mask"], torch.tensor(labels)
    )


@torch.no_grad()
def _evaluate(model, dataset, device, batch_size) -> tuple[list[int], list[int]]:
    model.eval()
    y_true: list[int] = []
    y_pred: list[int] = []
    for input_ids, attention_mask, labels in DataLoader(dataset, batch_size=batch_size):
        logits = model(
            input_ids=input_ids.to(device), attention_mask=attention_mask.to(device)
        ).logits
        y_pred.extend(int(p) for p in logits.argmax(dim=-1).cpu())
        y_true.extend(int(t) for t in labels)
    return y_true, y_pred


def finetune_and_eval(config: AdapterConfig) -> list[Path]:
    """Train for ``config.epochs`` epochs, writing one metrics JSON per epoch.

    Returns the written paths; the last epoch is duplicated as
    ``metrics_final.json``.
    """
    _set_seeds(config.seed)
    device = _device(config.device)

    tokenizer = AutoTokenizer.from_pretrained(config.checkpoint)
    tokenizer.add_special_tokens({"additional_special_tokens": list(config.segment_tags)})
    model = AutoModelForSequenceClassification.from_pretrained(
        config.checkpoint,
        num_labels=len(LABELS),
        id2label=dict(enumerate(LABELS)),
        label2id={label: i for i, label in enumerate(LABELS)},
        ignore_mismatched_sizes=True,
    )
    model.resize_token_embeddings(len(tokenizer))
    model.to(device)

    train_examples = load_examples(config.train_path)
    eval_examples = load_examples(config.eval_path)
    if not train_examples:
        raise ValueError(f"no training examples in {config.train_path}")
    if not eval_examples:
        raise ValueError(f"no evaluation examples in {config.eval_path}")
    train_dataset = _encode(train_examples, tokenizer, config)
    eval_dataset = _encode(eval_examples, tokenizer, config)

    generator = torch.Generator().manual_seed(config.seed)
    loader = DataLoader(
        train_dataset, batch_size=config.batch_size, shuffle=True, generator=generator
    )
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )

    out_dir = Path(config.out_dir)
    written: list[Path] = []
    for epoch in range(1, config.epochs + 1):
        model.train()
        for input_ids, attention_mask, labels in loader:
            optimizer.zero_grad()
            loss = model(
                input_ids=input_ids.to(device),
                attention_mask=attention_mask.to(device),
                labels=labels.to(device),
            ).loss
            loss.backward()
            optimizer.step()

        y_true, y_pred = _evaluate(model, eval_dataset, device, config.batch_size)
        payload = metrics_dict(
            confusion_matrix(y_true, y_pred),
            model=config.model_name,
            strategy=config.strategy,
            epoch=epoch,
            seed=config.seed,
        )
        written.append(write_metrics(payload, out_dir / f"metrics_epoch_{epoch:02d}.json"))

    final = out_dir / "metrics_final.json"
    final.write_bytes(written[-1].read_bytes())
    written.append(final)
    return written
