"""
Result models returned by the analysis service.
"""
from dataclasses import dataclass, field


@dataclass
class AnalysisReport:
    """
    Sections of a full analysis run.

    Field names are the stable keys of the structured output. Sections that
    failed are listed in `skipped` with their error message; provenance
    carries the tool version and tolerances and nothing time-dependent.
    """
    graph: dict = field(default_factory=dict)
    balance: dict = field(default_factory=dict)
    symmetry: dict = field(default_factory=dict)
    partition: dict = field(default_factory=dict)
    control: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'graph': self.graph,
            'balance': self.balance,
            'symmetry': self.symmetry,
            'partition': self.partition,
            'control': self.control,
            'skipped': self.skipped,
            'provenance': self.provenance,
        }
