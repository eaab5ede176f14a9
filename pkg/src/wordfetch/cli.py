"""Command-line entry points: simulate, lexicon tooling, gen-arena, serve."""

import argparse
import json
import os
import sys

from . import defaults
from .arena import arena_to_dict, build_arena, load_arena_config, validate_arena_config
from .errors import ConfigurationError, LexiconParseError, SchemaVersionError, WordfetchError
from .features import FEATURE_NAMES
from .game import EpisodeLedger, run_curriculum
from .lexicon import Lexicon, load_lexicon, merge_lexicons, save_lexicon
from .speaker import VocabularyGrammar

EXIT_BAD_CONFIG = 2
EXIT_UNWRITABLE = 3
EXIT_VERSION = 4
EXIT_BIND = 5


def _load_config(path):
    if path is None:
        return dict(defaults.DEFAULT_ARENA_CONFIG)
    return load_arena_config(path)


def _load_grammar(path):
    if path is None:
        return VocabularyGrammar.from_spec(defaults.DEFAULT_GRAMMAR_SPEC)
    return VocabularyGrammar.load(path)


def cmd_simulate(args):
    try:
        config = _load_config(args.config)
        validate_arena_config(config)
        grammar = _load_grammar(args.grammar)
        if args.episodes < 1:
            raise ConfigurationError("--episodes must be >= 1")
    except WordfetchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    lexicon = Lexicon(rng_seed=args.seed)
    if args.lexicon:
        try:
            lexicon = load_lexicon(args.lexicon)
        except SchemaVersionError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VERSION
        except WordfetchError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_CONFIG

    metrics, ledger = run_curriculum(
        lexicon,
        grammar,
        config,
        episodes=args.episodes,
        seed=args.seed,
        mode=args.mode,
        frame=args.frame,
        focus_rotation=args.focus_rotation,
    )

    try:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n")
        with open(os.path.join(args.out, "ledger.ndjson"), "w", encoding="utf-8") as fh:
            fh.write(ledger.to_ndjson())
        save_lexicon(lexicon, os.path.join(args.out, "lexicon.json"))
    except OSError as exc:
        print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE

    print(f"episodes          {metrics.episodes}")
    print(f"accuracy          {metrics.accuracy:.4f}")
    print(f"mean steps        {metrics.mean_steps:.2f}")
    print(f"early commit rate {metrics.early_commit_rate:.4f}")
    print("windowed accuracy:")
    for win in metrics.learning_curve:
        print(f"  {win['start']:>4}-{win['end']:<4} {win['accuracy']:.4f}")
    return 0


def cmd_lexicon(args):
    try:
        if args.action in ("export", "import"):
            lex = load_lexicon(args.paths[0])
            save_lexicon(lex, args.paths[1])
        elif args.action == "merge":
            merged = merge_lexicons(load_lexicon(args.paths[0]), load_lexicon(args.paths[1]))
            save_lexicon(merged, args.paths[2])
        elif args.action == "inspect":
            lex = load_lexicon(args.paths[0])
            for tok in lex.tokens():
                clf = lex.words[tok]
                top = max(range(len(FEATURE_NAMES)), key=lambda i: abs(clf.weights[i]))
                weights = " ".join(f"{name}={w:+.4f}" for name, w in zip(FEATURE_NAMES, clf.weights))
                print(
                    f"{tok:<12} pos={clf.pos_count:<5} neg={clf.neg_count:<5} "
                    f"bias={clf.bias:+.4f} top={FEATURE_NAMES[top]} | {weights}"
                )
        else:
            raise ConfigurationError(f"unknown lexicon action {args.action!r}")
    except SchemaVersionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERSION
    except (LexiconParseError, OSError, IndexError, WordfetchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    return 0


def cmd_gen_arena(args):
    try:
        config = _load_config(args.config)
        arena = build_arena(config, args.seed)
    except WordfetchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    print(json.dumps(arena_to_dict(arena), indent=2, sort_keys=True))
    return 0


def cmd_serve(args):
    import uvicorn

    from .server import create_app

    host, _, port = args.bind.rpartition(":")
    try:
        port = int(port)
    except ValueError:
        print(f"error: bad bind address {args.bind!r}", file=sys.stderr)
        return EXIT_BIND
    app = create_app(lexicon_path=args.lexicon)
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"error: cannot bind {args.bind}: {exc}", file=sys.stderr)
        return EXIT_BIND
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="wordfetch")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scripted curriculum")
    sim.add_argument("--config", help="arena config JSON (default built-in)")
    sim.add_argument("--grammar", help="grammar JSON (default built-in)")
    sim.add_argument("--lexicon", help="start from an existing lexicon file")
    sim.add_argument("--episodes", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--mode", choices=["frozen", "learning"], default="learning")
    sim.add_argument("--frame", choices=["speaker", "agent"], default="speaker")
    sim.add_argument("--focus-rotation", action="store_true",
                     help="cycle episodes through single-lexeme utterances")
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=cmd_simulate)

    lexp = sub.add_parser("lexicon", help="lexicon file tooling")
    lexp.add_argument("action", choices=["export", "import", "merge", "inspect"])
    lexp.add_argument("paths", nargs="+")
    lexp.set_defaults(func=cmd_lexicon)

    gen = sub.add_parser("gen-arena", help="print a seeded arena as JSON")
    gen.add_argument("--config")
    gen.add_argument("--seed", type=int, required=True)
    gen.set_defaults(func=cmd_gen_arena)

    srv = sub.add_parser("serve", help="run the interactive session service")
    srv.add_argument("--bind", default="127.0.0.1:8040")
    srv.add_argument("--lexicon", help="lexicon file to load and persist")
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
