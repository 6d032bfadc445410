"""Demo bundle: coastal restoration planning plus the lab workflow.

Builds a store exercising every unit kind: a mangrove restoration
intervention with its five site conditions and three candidate sites, an
occurrence-record schema feeding an automatic biodiversity-variable
derivation, a species-identification unit, a two-step lab composite
(prepare-and-stain before compositional identification), a connectivity
triage conditional, and a soil-moisture irrigation conditional.

Run `python -m aku.fixtures <path>` to write the bundle file.
"""

from __future__ import annotations

import sys
from decimal import Decimal

from .actions import (
    ActionUnit,
    ApplicabilityConditionSet,
    Binding,
    Branch,
    ChildStep,
    ConditionItem,
    ObjectiveUnit,
    PlanSpecUnit,
    SlotSpec,
)
from .conditions import parse_condition
from .orchestration import ExecutorRegistry
from .schemas import SlotSpecDef, StatementSchema
from .units import Assertion, ContextUnit, Provenance, StatementUnit, UnitStore
from .values import SlotValue, number, text

FIXTURE_TIME = "2026-01-15T00:00:00Z"
_PROV = Provenance(source="fixture", created_at=FIXTURE_TIME)


def _assert_site(attribute: str, value: SlotValue, quality: str = "observed", subject: str = "site") -> Assertion:
    return Assertion(
        subject=subject,
        attribute=attribute,
        value=value,
        quality=quality,
        observed_at=FIXTURE_TIME,
        provenance="survey",
    )


def _conditions(unit_id: str, label: str, items: list[tuple[str, str, str]]) -> ApplicabilityConditionSet:
    return ApplicabilityConditionSet(
        id=unit_id,
        label=label,
        provenance=_PROV,
        items=tuple(
            ConditionItem(kind=kind, expr=parse_condition(src), label=item_label)
            for kind, src, item_label in items
        ),
    )


def site_assertions(
    inundation: str | None = "40",
    accretion: str | None = "2",
    salinity: str | None = "28",
    wave: str | None = "0.3",
    disturbance: bool | None = False,
    accretion_quality: str = "observed",
) -> tuple[Assertion, ...]:
    rows = []
    if inundation is not None:
        rows.append(_assert_site("tidal_inundation_pct", number(Decimal(inundation), "pct")))
    if accretion is not None:
        rows.append(
            _assert_site(
                "sediment_accretion_mm_per_yr",
                number(Decimal(accretion), "mm_per_yr"),
                quality=accretion_quality,
            )
        )
    if salinity is not None:
        rows.append(_assert_site("salinity_psu", number(Decimal(salinity), "psu")))
    if wave is not None:
        rows.append(_assert_site("wave_energy_index", number(Decimal(wave))))
    if disturbance is not None:
        rows.append(_assert_site("ongoing_disturbance", SlotValue(kind="boolean", boolean=disturbance)))
    return tuple(rows)


MANGROVE_CONDITION_ITEMS = [
    ("contextual", "site.tidal_inundation_pct BETWEEN 20 pct AND 75 pct", "tidal inundation within tolerance"),
    ("contextual", "site.sediment_accretion_mm_per_yr >= 0 mm_per_yr", "sediment accretion non-negative"),
    ("contextual", "site.salinity_psu <= 36 psu", "salinity within species tolerance"),
    ("contextual", "site.wave_energy_index < 0.5", "wave energy below threshold"),
    ("contextual", "site.ongoing_disturbance == false", "no ongoing physical disturbance"),
]


def build_store() -> UnitStore:
    store = UnitStore()
    units: list = []

    # --- restoration sites --------------------------------------------------
    units.append(
        ContextUnit(
            id="ex:site-A",
            label="estuary site A",
            provenance=_PROV,
            frame="situation",
            assertions=site_assertions(),
        )
    )
    units.append(
        ContextUnit(
            id="ex:site-B",
            label="exposed site B",
            provenance=_PROV,
            frame="situation",
            assertions=site_assertions(inundation="10"),
        )
    )
    units.append(
        ContextUnit(
            id="ex:site-C",
            label="unsampled site C",
            provenance=_PROV,
            frame="situation",
            assertions=site_assertions(salinity=None),
        )
    )

    # --- mangrove restoration intervention ----------------------------------
    units.append(
        _conditions("ex:mangrove-conditions", "mangrove site suitability", MANGROVE_CONDITION_ITEMS)
    )
    units.append(
        PlanSpecUnit(
            id="ex:mangrove-plan",
            label="community-based restoration protocol",
            provenance=_PROV,
            plan_kind="procedural",
            directive_text=(
                "Prepare substrate, restore tidal channels where needed, then plant "
                "propagules of the selected species mix and monitor quarterly."
            ),
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:mangrove-objective",
            label="self-sustaining mangrove stand",
            provenance=_PROV,
            objective_class="intervention",
            description="Establish a self-sustaining mangrove ecosystem of defined composition and extent.",
            tags=("restoration", "mangrove", "coastal"),
        )
    )
    units.append(
        ActionUnit(
            id="ex:mangrove",
            label="mangrove restoration planting",
            provenance=_PROV,
            parts=("ex:mangrove-plan", "ex:mangrove-conditions", "ex:mangrove-objective"),
            action_class="intervention",
            inputs=(SlotSpec(role="site", direction="input", entity_kind="material"),),
            outputs=(SlotSpec(role="restored_site", direction="output", entity_kind="material"),),
            plan="ex:mangrove-plan",
            conditions="ex:mangrove-conditions",
            objective="ex:mangrove-objective",
            context_requirements=(
                "site.tidal_inundation_pct",
                "site.sediment_accretion_mm_per_yr",
                "site.salinity_psu",
                "site.wave_energy_index",
                "site.ongoing_disturbance",
            ),
        )
    )

    # --- occurrence records and biodiversity-variable derivation ------------
    units.append(
        StatementSchema(
            id="ex:occurrence-schema",
            label="species occurrence record",
            provenance=_PROV,
            statement_class="assertional",
            slots=(
                SlotSpecDef(role="taxon", datatype="text", mandatory=True),
                SlotSpecDef(role="latitude", datatype="number", unit="deg", range=(Decimal(-90), Decimal(90)), mandatory=True),
                SlotSpecDef(role="longitude", datatype="number", unit="deg", range=(Decimal(-180), Decimal(180)), mandatory=True),
                SlotSpecDef(role="event_date", datatype="timestamp", mandatory=True),
                SlotSpecDef(role="sampling_effort", datatype="number", unit="hr", mandatory=True),
            ),
        )
    )
    units.append(
        StatementUnit(
            id="ex:occ-1",
            label="Avicennia marina occurrence",
            provenance=_PROV,
            statement_class="assertional",
            schema_id="ex:occurrence-schema",
            about="ex:site-A",
            slots={
                "taxon": text("Avicennia marina"),
                "latitude": number(Decimal("-6.35"), "deg"),
                "longitude": number(Decimal("39.20"), "deg"),
                "event_date": SlotValue(kind="timestamp", timestamp="2026-01-10T08:30:00Z"),
                "sampling_effort": number(Decimal("4"), "hr"),
            },
        )
    )
    units.append(
        _conditions("ex:ebv-conditions", "occurrence inputs conform", [])
    )
    units.append(
        PlanSpecUnit(
            id="ex:ebv-plan",
            label="occupancy aggregation",
            provenance=_PROV,
            plan_kind="algorithmic",
            executable="derive_ebv",
            directive_text="Aggregate occurrence records into per-cell occupancy estimates.",
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:ebv-objective",
            label="biodiversity state variable",
            provenance=_PROV,
            objective_class="transformational",
            description="Produce a spatially explicit biodiversity state estimate from occurrence records.",
            tags=("monitoring", "ebv"),
        )
    )
    units.append(
        ActionUnit(
            id="ex:derive-ebv",
            label="derive biodiversity state variable",
            provenance=_PROV,
            parts=("ex:ebv-plan", "ex:ebv-conditions", "ex:ebv-objective"),
            action_class="transformational",
            inputs=(
                SlotSpec(
                    role="occurrences",
                    direction="input",
                    entity_kind="information",
                    schema_id="ex:occurrence-schema",
                    cardinality=(1, None),
                ),
            ),
            outputs=(SlotSpec(role="ebv_product", direction="output", entity_kind="information"),),
            plan="ex:ebv-plan",
            conditions="ex:ebv-conditions",
            objective="ex:ebv-objective",
        )
    )

    # --- species identification (epistemic) ---------------------------------
    units.append(
        _conditions(
            "ex:species-id-conditions",
            "identification validity",
            [
                ("referential", "ATTESTED(species_identification_competence)", "observer competence attested"),
                ("contextual", "specimen.condition IN {\"intact\", \"good\"}", "specimen condition adequate"),
            ],
        )
    )
    units.append(
        PlanSpecUnit(
            id="ex:species-id-plan",
            label="identification key",
            provenance=_PROV,
            plan_kind="diagnostic",
            directive_text="Apply the regional mangrove identification key; record taxon, location, date, effort.",
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:species-id-objective",
            label="reliable occurrence record",
            provenance=_PROV,
            objective_class="epistemic",
            description="Assign the observed specimen to a taxon and produce an occurrence record.",
            tags=("monitoring", "identification"),
        )
    )
    units.append(
        ActionUnit(
            id="ex:species-id",
            label="species identification",
            provenance=_PROV,
            parts=("ex:species-id-plan", "ex:species-id-conditions", "ex:species-id-objective"),
            action_class="epistemic",
            direction="describe",
            inputs=(SlotSpec(role="specimen", direction="input", entity_kind="material"),),
            outputs=(
                SlotSpec(
                    role="occurrence_record",
                    direction="output",
                    entity_kind="information",
                    schema_id="ex:occurrence-schema",
                ),
            ),
            plan="ex:species-id-plan",
            conditions="ex:species-id-conditions",
            objective="ex:species-id-objective",
            context_requirements=("specimen.condition",),
        )
    )

    # --- lab composite: prepare-and-stain precedes identification -----------
    units.append(
        _conditions(
            "ex:prep-conditions",
            "sample ready for staining",
            [("contextual", "sample.untreated == true", "sample still untreated")],
        )
    )
    units.append(
        PlanSpecUnit(
            id="ex:prep-plan",
            label="preparation and staining method",
            provenance=_PROV,
            plan_kind="procedural",
            directive_text="Fix, section, and stain the tissue sample; record the stained section reference.",
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:prep-objective",
            label="stained section",
            provenance=_PROV,
            objective_class="intervention",
            description="Render tissue features observable via staining.",
            tags=("lab",),
        )
    )
    units.append(
        ActionUnit(
            id="ex:tissue-prep",
            label="tissue preparation and staining",
            provenance=_PROV,
            parts=("ex:prep-plan", "ex:prep-conditions", "ex:prep-objective"),
            action_class="intervention",
            inputs=(SlotSpec(role="untreated_sample", direction="input", entity_kind="material"),),
            outputs=(SlotSpec(role="stained_section", direction="output", entity_kind="material"),),
            plan="ex:prep-plan",
            conditions="ex:prep-conditions",
            objective="ex:prep-objective",
            context_requirements=("sample.untreated",),
        )
    )
    units.append(
        _conditions(
            "ex:identify-conditions",
            "identification feasible",
            [("referential", "ATTESTED(histology_competence)", "analyst competence attested")],
        )
    )
    units.append(
        PlanSpecUnit(
            id="ex:identify-plan",
            label="compositional identification procedure",
            provenance=_PROV,
            plan_kind="diagnostic",
            directive_text="Identify tissue composition under the microscope and describe it.",
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:identify-objective",
            label="compositional description",
            provenance=_PROV,
            objective_class="epistemic",
            description="Produce a correct compositional description of the stained section.",
            tags=("lab",),
        )
    )
    units.append(
        ActionUnit(
            id="ex:compositional-id",
            label="compositional identification",
            provenance=_PROV,
            parts=("ex:identify-plan", "ex:identify-conditions", "ex:identify-objective"),
            action_class="epistemic",
            inputs=(SlotSpec(role="stained_section", direction="input", entity_kind="material"),),
            outputs=(SlotSpec(role="composition_description", direction="output", entity_kind="information"),),
            plan="ex:identify-plan",
            conditions="ex:identify-conditions",
            objective="ex:identify-objective",
        )
    )
    units.append(
        _conditions("ex:histology-conditions", "sample available", [("contextual", "EXISTS sample.untreated", "an untreated sample is recorded")])
    )
    units.append(
        PlanSpecUnit(
            id="ex:histology-plan",
            label="two-step analysis ordering",
            provenance=_PROV,
            plan_kind="procedural",
            directive_text="Run preparation and staining, then compositional identification.",
            ordering=(("prep", ("identify",)), ("identify", ())),
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:histology-objective",
            label="tissue composition analysis",
            provenance=_PROV,
            objective_class="epistemic",
            description="Determine the composition of an untreated tissue sample.",
            tags=("lab", "analysis"),
        )
    )
    units.append(
        ActionUnit(
            id="ex:histology",
            label="histological tissue composition analysis",
            provenance=_PROV,
            parts=(
                "ex:histology-plan",
                "ex:histology-conditions",
                "ex:histology-objective",
                "ex:tissue-prep",
                "ex:compositional-id",
            ),
            action_class="composite",
            inputs=(SlotSpec(role="untreated_sample", direction="input", entity_kind="material"),),
            outputs=(SlotSpec(role="composition_description", direction="output", entity_kind="information"),),
            plan="ex:histology-plan",
            conditions="ex:histology-conditions",
            objective="ex:histology-objective",
            children=(
                ChildStep(step_id="prep", action_unit="ex:tissue-prep", precedes=("identify",)),
                ChildStep(
                    step_id="identify",
                    action_unit="ex:compositional-id",
                    bindings=(Binding("prep", "stained_section", "stained_section"),),
                ),
            ),
        )
    )
    units.append(
        ContextUnit(
            id="ex:lab-1",
            label="histology bench context",
            provenance=_PROV,
            frame="situation",
            assertions=(
                Assertion(
                    subject="sample",
                    attribute="untreated",
                    value=SlotValue(kind="boolean", boolean=True),
                    quality="observed",
                    observed_at=FIXTURE_TIME,
                    provenance="intake",
                ),
                Assertion(
                    subject="analyst",
                    attribute="attested:histology_competence",
                    value=SlotValue(kind="boolean", boolean=True),
                    quality="observed",
                    observed_at=FIXTURE_TIME,
                    provenance="hr-registry",
                ),
            ),
        )
    )

    # --- connectivity triage conditional -------------------------------------
    units.append(
        _conditions(
            "ex:guard-passive",
            "connectivity supports natural regeneration",
            [("contextual", "site.hydrological_connectivity > 0.6", "connectivity above threshold")],
        )
    )
    units.append(
        _conditions(
            "ex:guard-engineering",
            "connectivity restorable",
            [("contextual", "site.connectivity_restorable == true", "connectivity restorable by engineering")],
        )
    )
    for suffix, kind, description in (
        ("passive-regeneration", "passive natural regeneration", "Let the system recover; monitor recruitment."),
        ("hydro-engineering", "hydrological restoration", "Re-open tidal channels to restore connectivity."),
    ):
        units.append(
            _conditions(f"ex:{suffix}-conditions", f"{kind} preconditions", [("contextual", "EXISTS site.hydrological_connectivity", "connectivity measured")])
        )
        units.append(
            PlanSpecUnit(
                id=f"ex:{suffix}-plan",
                label=f"{kind} plan",
                provenance=_PROV,
                plan_kind="procedural",
                directive_text=description,
            )
        )
        units.append(
            ObjectiveUnit(
                id=f"ex:{suffix}-objective",
                label=kind,
                provenance=_PROV,
                objective_class="intervention",
                description=description,
                tags=("restoration",),
            )
        )
        units.append(
            ActionUnit(
                id=f"ex:{suffix}",
                label=kind,
                provenance=_PROV,
                parts=(f"ex:{suffix}-plan", f"ex:{suffix}-conditions", f"ex:{suffix}-objective"),
                action_class="intervention",
                inputs=(SlotSpec(role="site", direction="input", entity_kind="material"),),
                outputs=(SlotSpec(role="treated_site", direction="output", entity_kind="material"),),
                plan=f"ex:{suffix}-plan",
                conditions=f"ex:{suffix}-conditions",
                objective=f"ex:{suffix}-objective",
            )
        )
    units.append(
        _conditions("ex:triage-conditions", "triage inputs", [])
    )
    units.append(
        PlanSpecUnit(
            id="ex:triage-plan",
            label="triage branch directives",
            provenance=_PROV,
            plan_kind="procedural",
            directive_text=(
                "If connectivity supports natural regeneration, trigger it; else if restorable, "
                "trigger hydrological restoration; else flag the site as currently non-applicable."
            ),
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:triage-objective",
            label="site-appropriate restoration pathway",
            provenance=_PROV,
            objective_class="intervention",
            description="Route each candidate site to the restoration pathway its state supports.",
            tags=("restoration", "triage"),
        )
    )
    units.append(
        ActionUnit(
            id="ex:restoration-triage",
            label="restoration pathway triage",
            provenance=_PROV,
            parts=("ex:triage-plan", "ex:triage-conditions", "ex:triage-objective"),
            action_class="conditional",
            plan="ex:triage-plan",
            conditions="ex:triage-conditions",
            objective="ex:triage-objective",
            branches=(
                Branch(guard="ex:guard-passive", action="ex:passive-regeneration"),
                Branch(guard="ex:guard-engineering", action="ex:hydro-engineering"),
            ),
        )
    )

    # --- irrigation conditional ----------------------------------------------
    units.append(
        _conditions(
            "ex:guard-dry",
            "soil moisture below threshold",
            [("contextual", "field.soil_moisture < 0.2", "soil moisture below threshold")],
        )
    )
    units.append(
        _conditions(
            "ex:irrigate-conditions",
            "irrigation preconditions",
            [("contextual", "EXISTS field.soil_moisture", "soil moisture measured")],
        )
    )
    units.append(
        PlanSpecUnit(
            id="ex:irrigate-plan",
            label="irrigation instructions",
            provenance=_PROV,
            plan_kind="procedural",
            directive_text="Irrigate the field until soil moisture reaches the target band.",
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:irrigate-objective",
            label="adequate soil moisture",
            provenance=_PROV,
            objective_class="intervention",
            description="Bring soil moisture back into the target band.",
            tags=("agriculture",),
        )
    )
    units.append(
        ActionUnit(
            id="ex:irrigate",
            label="irrigate field",
            provenance=_PROV,
            parts=("ex:irrigate-plan", "ex:irrigate-conditions", "ex:irrigate-objective"),
            action_class="intervention",
            inputs=(SlotSpec(role="field", direction="input", entity_kind="material"),),
            outputs=(SlotSpec(role="irrigated_field", direction="output", entity_kind="material"),),
            plan="ex:irrigate-plan",
            conditions="ex:irrigate-conditions",
            objective="ex:irrigate-objective",
        )
    )
    units.append(
        _conditions("ex:irrigation-check-conditions", "irrigation check inputs", [])
    )
    units.append(
        PlanSpecUnit(
            id="ex:irrigation-check-plan",
            label="moisture check directive",
            provenance=_PROV,
            plan_kind="procedural",
            directive_text="If soil moisture is below threshold, trigger irrigation.",
        )
    )
    units.append(
        ObjectiveUnit(
            id="ex:irrigation-check-objective",
            label="moisture-gated irrigation",
            provenance=_PROV,
            objective_class="intervention",
            description="Irrigate only when the field is measurably dry.",
            tags=("agriculture",),
        )
    )
    units.append(
        ActionUnit(
            id="ex:irrigation-check",
            label="soil moisture gate",
            provenance=_PROV,
            parts=("ex:irrigation-check-plan", "ex:irrigation-check-conditions", "ex:irrigation-check-objective"),
            action_class="conditional",
            plan="ex:irrigation-check-plan",
            conditions="ex:irrigation-check-conditions",
            objective="ex:irrigation-check-objective",
            branches=(Branch(guard="ex:guard-dry", action="ex:irrigate"),),
        )
    )
    units.append(
        ContextUnit(
            id="ex:field-1",
            label="field plot 1",
            provenance=_PROV,
            frame="situation",
            assertions=(
                Assertion(
                    subject="field",
                    attribute="soil_moisture",
                    value=number(Decimal("0.1")),
                    quality="observed",
                    observed_at=FIXTURE_TIME,
                    provenance="sensor",
                ),
            ),
        )
    )

    store.put_units(units)
    return store


def derive_ebv(inputs: dict, context: ContextUnit, store: UnitStore) -> dict:
    """Reference executor: summarize bound occurrence statements into a
    single occupancy figure. Registered under the name "derive_ebv"."""
    from .engine import _bound_statements

    records = _bound_statements(store, context, "ex:occurrence-schema")
    return {"ebv_product": number(Decimal(len(records)))}


def default_registry() -> ExecutorRegistry:
    registry = ExecutorRegistry()
    registry.register("derive_ebv", derive_ebv)
    return registry


def main(argv: list[str] | None = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    path = args[0] if args else "fixtures/demo-bundle.json"
    build_store().save_bundle(path)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
