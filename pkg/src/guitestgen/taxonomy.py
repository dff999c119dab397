"""Classification of executed GUI actions into Menu/CRUD/Input/SaveKO/SaveOK."""
from __future__ import annotations

import enum

from .app import ROLE_CANCEL, ROLE_CRUD, ROLE_SUBMIT, DbChangeEvent


class ActionClass(str, enum.Enum):
    MENU = "Menu"
    CRUD = "CRUD"
    INPUT = "Input"
    SAVE_KO = "SaveKO"
    SAVE_OK = "SaveOK"
    OTHER = "Other"


TABLE_CLASSES = (ActionClass.MENU, ActionClass.CRUD, ActionClass.INPUT, ActionClass.SAVE_OK, ActionClass.SAVE_KO)


def classify_action(step) -> ActionClass:
    """Class of one executed step (anything with ``action``, ``target`` and ``events``)."""
    target = step.target
    if target.is_menu_action:
        return ActionClass.MENU
    if step.action.verb in ("fill", "pick"):
        return ActionClass.INPUT
    if target.role == ROLE_CRUD:
        return ActionClass.CRUD
    if target.role == ROLE_SUBMIT:
        if any(isinstance(ev, DbChangeEvent) for ev in step.events):
            return ActionClass.SAVE_OK
        return ActionClass.SAVE_KO
    if target.role == ROLE_CANCEL:
        return ActionClass.SAVE_KO
    return ActionClass.OTHER
