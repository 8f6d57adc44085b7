"""Subcommand routing"""
import argparse
import inspect
import logging
from dataclasses import dataclass, field
from typing import Any, Awaitable, Callable, Dict, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Argument = Tuple[Tuple[str, ...], Dict[str, Any]]


def arg(*flags: str, **options: Any) -> Argument:
    return flags, options


@dataclass
class Command:
    name: str
    callback: Callable[..., Awaitable[None]]
    help: str
    arguments: Tuple[Argument, ...] = ()
    group: Optional[str] = None
    shortcut: bool = False
    aliases: Tuple[str, ...] = ()

    async def __call__(self, args: argparse.Namespace, data: Dict[str, Any]) -> None:
        """Call the handler with the injected dependencies it declares"""
        parameters = inspect.signature(self.callback).parameters
        await self.callback(args, **{key: value for key, value in data.items() if key in parameters})


@dataclass
class Router:
    name: str
    commands: List[Command] = field(default_factory=list)

    def command(self, name: str, help: str, *arguments: Argument, group: Optional[str] = None,
                shortcut: bool = False, aliases: Sequence[str] = ()):
        def decorator(callback):
            self.commands.append(Command(name, callback, help, tuple(arguments), group, shortcut, tuple(aliases)))
            return callback
        return decorator

    def find(self, name: str) -> Optional[Command]:
        return next((c for c in self.commands if c.name == name or name in c.aliases), None)


def register(routers: Sequence[Router], subparsers, parents: Sequence[argparse.ArgumentParser]) -> None:
    """Top-level subcommands; grouped ones (build, bound) also get a group parser"""
    groups: Dict[str, Any] = {}
    for router in routers:
        for command in router.commands:
            targets = []
            if command.group is None or command.shortcut:
                targets.append((subparsers, command.aliases))
            if command.group is not None:
                if command.group not in groups:
                    group_parser = subparsers.add_parser(command.group, help=f"{command.group} subcommands")
                    groups[command.group] = group_parser.add_subparsers(
                        dest=f"{command.group}_kind", required=True, metavar="KIND")
                targets.append((groups[command.group], ()))
            for target, aliases in targets:
                parser = target.add_parser(command.name, help=command.help, description=command.help,
                                           aliases=list(aliases), parents=list(parents))
                for flags, options in command.arguments:
                    parser.add_argument(*flags, **options)
                parser.set_defaults(command=command)
