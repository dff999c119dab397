"""Shipped application presets, catalogs and test plans.

``desk``
    Three small entities and 12 top-bar actions; the default for tests.
``erp-like``
    Six entities (Projects, Orders, Invoices, Tickets, Modules, Offers),
    116 fields over 30 tabs and 95 top-bar actions.
``invoice-demo``
    A single Invoices entity laid out like the sample invoice form.

All field labels, catalog values and plan rows are synthetic.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .app import AppSpec, EntityTypeSpec, FieldSpec
from .catalog import Catalog, load_catalog

PRESETS = ("desk", "erp-like", "invoice-demo")
DATA = resources.files("guitestgen") / "data"


def _entity(name, singular, tabs, rows, initial=3, **kw) -> EntityTypeSpec:
    fields = []
    for tab, specs in enumerate(rows):
        for spec in specs:
            label, kind, req, *rest = spec
            extra = rest[0] if rest else {}
            if kind.startswith("list:") or kind.startswith("combo:"):
                kind, vals = kind.split(":", 1)
                extra = {"values": tuple(vals.split("|")), **extra}
            fields.append(FieldSpec(label, kind, req, tab, **extra))
    return EntityTypeSpec(
        name=name,
        singular=singular,
        fields=tuple(fields),
        tabs=len(tabs),
        tab_names=tuple(tabs),
        initial_records=initial,
        **kw,
    )


R, O = True, False


def desk(seed: int = 0) -> AppSpec:
    contacts = _entity("Contacts", "Contact", ["Contact"], [
        [("Name", "text", R), ("Email", "email", R), ("Phone", "text", O)],
    ], initial=2)
    orders = _entity("Orders", "Order", ["Order", "Delivery"], [
        [("Order Number", "numeric-id", R), ("Product", "list:Pen|Ink|Paper", R), ("Quantity", "numeric-id", O)],
        [("Delivery Date", "date", R), ("Notes", "text", O)],
    ], initial=2)
    tasks = _entity("Tasks", "Task", ["Task"], [
        [("Title", "text", R), ("Due", "date", O), ("Priority", "list:Low|High", O, {"default": "Low"}),
         ("Tags", "combo:home|work", O)],
    ], initial=2)
    return AppSpec((contacts, orders, tasks), 12, seed, "desk",
                   ("Help", "Settings", "Reports", "Calendar", "Messages", "Print", "Export", "Profile", "Logout"))


def erp_like(seed: int = 0) -> AppSpec:
    projects = _entity("Projects", "Project", ["Project", "Customer", "Schedule", "Budget", "Notes"], [
        [("Project Code", "numeric-id", R), ("Project Name", "text", R),
         ("Status", "list:Draft|Active|Closed", O, {"default": "Draft"}), ("Manager", "text", R)],
        [("Customer Name", "text", R), ("Customer Email", "email", R), ("Customer Phone", "text", O),
         ("Customer Country", "text", O)],
        [("Start Date", "date", R), ("End Date", "date", O), ("Milestones", "combo:Design|Build|Test|Deploy", O),
         ("Priority", "list:Low|Medium|High", O, {"default": "Medium"})],
        [("Budget Amount", "numeric-id", R), ("Cost Center", "text", O),
         ("Currency", "list:EUR|USD|CHF", O, {"default": "EUR"}), ("Approved By", "text", O)],
        [("Description", "text", O), ("Tags", "combo:internal|external|urgent", O), ("Attachment Name", "text", O),
         ("Reviewer Email", "email", O)],
    ])
    orders = _entity("Orders", "Order", ["Order", "Customer", "Items", "Shipping", "Billing", "Notes"], [
        [("Order Number", "numeric-id", R), ("Order Date", "date", R),
         ("Order Type", "list:Standard|Express|Internal", O, {"default": "Standard"}), ("Sales Agent", "text", R)],
        [("Customer Name", "text", R), ("Customer Email", "email", R), ("Customer Phone", "text", O),
         ("VAT Number", "text", O)],
        [("Item Code", "numeric-id", R), ("Quantity", "numeric-id", R), ("Unit Price", "text", O),
         ("Discount", "list:0%|5%|10%", O, {"default": "0%"})],
        [("Shipping Address", "text", R), ("Shipping Date", "date", O), ("Carrier", "list:DHL|UPS|Post", O),
         ("Tracking Code", "text", O)],
        [("Billing Address", "text", O), ("Payment Method", "list:Transfer|Card|Cash", O, {"default": "Transfer"}),
         ("IBAN", "text", O)],
        [("Notes", "text", O), ("Tags", "combo:gift|fragile|priority", O), ("Contact Email", "email", O)],
    ])
    invoices = _entity("Invoices", "Invoice", ["Invoice", "Client Data", "Items", "Payment", "Notes"], [
        [("Invoice Number", "text", R, {"column": "NUMBER"}), ("Invoice Name", "text", R, {"column": "LABEL"}),
         ("State", "list:not Sent|Sent|Replied", O, {"default": "Sent"}), ("Date", "date", O, {"default": "05-06-2015"})],
        [("Client Data - Name", "text", R, {"column": "NAME"}), ("Client Data - Surname", "text", R, {"column": "SURNAME"}),
         ("Client Data - Email", "email", R, {"column": "EMAIL"}), ("Client Data - Country", "text", R, {"column": "COUNTRY"})],
        [("Item Code", "numeric-id", R), ("Quantity", "numeric-id", O), ("Unit Price", "text", O),
         ("Discount", "list:0%|5%|10%", O, {"default": "0%"})],
        [("Payment Terms", "list:30 days|60 days|90 days", O, {"default": "30 days"}), ("Due Date", "date", R),
         ("IBAN", "text", O)],
        [("Notes", "text", O), ("Tags", "combo:urgent|internal|export", O), ("Approved By", "text", O)],
    ])
    tickets = _entity("Tickets", "Ticket", ["Ticket", "Requester", "Resolution"], [
        [("Ticket Title", "text", R), ("Severity", "list:Low|Medium|High|Critical", O, {"default": "Low"}),
         ("Module Code", "numeric-id", R), ("Opened On", "date", R), ("Channel", "list:Phone|Email|Portal", O),
         ("Summary", "text", O)],
        [("Requester Name", "text", R), ("Requester Email", "email", R), ("Requester Phone", "text", O),
         ("Customer Name", "text", O)],
        [("Assignee", "text", O), ("Resolution Notes", "text", O), ("Closed On", "date", O),
         ("Labels", "combo:bug|question|feature", O), ("Effort Hours", "numeric-id", O), ("Reviewer Email", "email", O)],
    ])
    modules = _entity("Modules", "Module", ["Module", "Versions", "Documentation"], [
        [("Module Code", "numeric-id", R), ("Module Name", "text", R), ("Owner Email", "email", R),
         ("Category", "list:Core|Addon|Report", O, {"default": "Core"}), ("Owner Name", "text", O)],
        [("Version Number", "text", R), ("Release Date", "date", R), ("Compatible With", "combo:v1|v2|v3", O),
         ("Build Number", "numeric-id", O), ("Changelog", "text", O)],
        [("Manual Title", "text", O), ("Manual Link", "text", O), ("Reviewer Email", "email", O), ("Notes", "text", O)],
    ])
    offers = _entity("Offers", "Offer", ["Offer", "Customer", "Products", "Pricing", "Terms", "Delivery", "Approval",
                                          "Notes"], [
        [("Offer Number", "numeric-id", R), ("Offer Title", "text", R), ("Offer Date", "date", R),
         ("Status", "list:Draft|Sent|Accepted|Rejected", O, {"default": "Draft"})],
        [("Customer Name", "text", R), ("Customer Email", "email", R), ("Customer Country", "text", O),
         ("Customer Phone", "text", O)],
        [("Product Code", "numeric-id", R), ("Quantity", "numeric-id", O), ("Product Line", "list:Hardware|Software|Service", O)],
        [("Unit Price", "text", O), ("Discount", "list:0%|5%|10%", O, {"default": "0%"}),
         ("Currency", "list:EUR|USD|CHF", O, {"default": "EUR"})],
        [("Valid Until", "date", R), ("Payment Terms", "list:30 days|60 days|90 days", O), ("Warranty", "text", O)],
        [("Delivery Address", "text", O), ("Delivery Date", "date", O), ("Carrier", "list:DHL|UPS|Post", O)],
        [("Approved By", "text", O), ("Approval Date", "date", O), ("Reviewer Email", "email", O)],
        [("Notes", "text", O), ("Tags", "combo:strategic|renewal|discounted", O), ("Attachment Name", "text", O)],
    ])
    return AppSpec((projects, orders, invoices, tickets, modules, offers), 95, seed, "erp-like")


def invoice_demo(seed: int = 0) -> AppSpec:
    invoices = _entity("Invoices", "Invoice", ["Invoice"], [
        [("Invoice Number", "text", R, {"column": "NUMBER"}), ("Invoice Name", "text", R, {"column": "LABEL"}),
         ("State", "list:not Sent|Sent|Replied", O, {"default": "Sent", "column": None}),
         ("Date", "date", O, {"default": "05-06-2015", "column": None}),
         ("Client Data - Name", "text", R, {"column": "NAME"}),
         ("Client Data - Surname", "text", R, {"column": "SURNAME"}),
         ("Client Data - Email", "email", R, {"column": "EMAIL"}),
         ("Client Data - Country", "text", R, {"column": "COUNTRY"})],
    ])
    return AppSpec((invoices,), 3, seed, "invoice-demo", ("Help", "Settings"))


def app_preset(name: str, seed: int = 0) -> AppSpec:
    builders = {"desk": desk, "erp-like": erp_like, "invoice-demo": invoice_demo}
    try:
        return builders[name](seed)
    except KeyError:
        raise ValueError(f"unknown app preset {name!r}; expected one of {PRESETS}") from None


def catalog_path(name: str) -> Path:
    return Path(str(DATA / f"{name}.catalog"))


def catalog_preset(name: str, seed: int = 0) -> Catalog:
    return load_catalog(catalog_path(name), seed)


def plan_path(name: str) -> Path:
    return Path(str(DATA / "plans" / name))
