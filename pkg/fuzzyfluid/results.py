"""

Containers for the quantities produced by a run and by a limit sweep.

"""

from dataclasses import astuple, dataclass, fields

import numpy as np

from fuzzyfluid import config as cfg


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Diagnostics of one time level, one row of diagnostics.csv"""

    t: float
    H: float
    L2_lambda: float
    L2_mu: float
    reality_residual: float
    aliasing_loss: float
    helicity_scalar: float
    helicity_x: float
    helicity_y: float
    helicity_z: float


    def as_row(self):
        return np.array(astuple(self), dtype=float)


    @classmethod
    def column_names(cls):
        return tuple(fld.name for fld in fields(cls))


class Trajectory(object):
    """
    Class to store and summarize the diagnostics of one run.
    """


    def __init__(self, records=(), meta=None):
        "Constructor."

        self.records = list()
        self.meta = dict() if meta is None else dict(meta)
        for rec in records:
            self.add(rec)


    def add(self, record):
        """Appends a record; time must strictly increase."""

        if not isinstance(record, DiagnosticsRecord):
            raise TypeError('Expecting a DiagnosticsRecord, not {}'.format(type(record)))

        if self.records and record.t <= self.records[-1].t:
            raise ValueError('Record at t={} does not follow the last one at t={}'
                             ''.format(record.t, self.records[-1].t))

        self.records.append(record)


    def add_meta(self, name, value):
        self.meta[name] = value


    def __len__(self):
        return len(self.records)


    def __iter__(self):
        return iter(self.records)


    def to_array(self, column=None):
        """
        Consolidates the records into an array

        Parameters
        -----------
        column : str, optional
            name of a single diagnostics column.
            If None, all columns are returned in the order of diagnostics.csv

        Returns
        --------
        values : ndarray
            num_records X num_columns, or num_records if a column is chosen

        """

        if not self.records:
            return np.empty((0, len(cfg.diagnostics_columns)))

        table = np.vstack([rec.as_row() for rec in self.records])
        if column is None:
            return table

        if column not in cfg.diagnostics_columns:
            raise ValueError('Unrecognized column {}. Choose one of {}'
                             ''.format(column, cfg.diagnostics_columns))

        return table[:, cfg.diagnostics_columns.index(column)]


    def energy_drift(self):
        """max_t |H(t) - H(0)| / H(0); zero for an empty flow."""

        energy = self.to_array('H')
        if energy.size == 0 or energy[0] == 0.0:
            return 0.0

        return float(np.max(np.abs(energy - energy[0])) / abs(energy[0]))


    def max_reality_residual(self):
        return float(np.max(self.to_array('reality_residual')))


    def max_aliasing_loss(self):
        return float(np.max(self.to_array('aliasing_loss')))


    def __str__(self):
        """Simple summary"""

        if not self.records:
            return 'No records added so far!'

        first, last = self.records[0], self.records[-1]
        return '# records : {}, t : {:.6g} to {:.6g}\n' \
               '\tH(t0) {:.10g}  H(t_end) {:.10g}  relative drift {:.3e}\n' \
               '\tmax reality residual {:.3e}  max aliasing loss {:.3e}' \
               ''.format(len(self.records), first.t, last.t, first.H, last.H,
                         self.energy_drift(), self.max_reality_residual(),
                         self.max_aliasing_loss())


    def __repr__(self):
        return self.__str__()


class SweepResults(object):
    """
    Distances to the classical run at t_end, one row per cutoff value.
    """


    def __init__(self, pairing, h, kmax, dt, t_end):
        "Constructor."

        self.pairing = pairing
        self.h = h
        self.kmax = kmax
        self.dt = dt
        self.t_end = t_end
        self.rows = list()


    def add(self, a, distance):
        """
        Adds the distance for a cutoff value, deriving the empirical order from
        the previous row. Rows with a = 0 or D = 0 carry no order.
        """

        order = np.nan
        if self.rows:
            a_prev, dist_prev, _ = self.rows[-1]
            if a_prev > 0.0 and a > 0.0 and dist_prev > 0.0 and distance > 0.0:
                order = np.log(dist_prev / distance) / np.log(a_prev / a)

        self.rows.append((float(a), float(distance), float(order)))


    def to_array(self):
        """num_rows X 3 array of (a, D, empirical_order)"""

        if not self.rows:
            return np.empty((0, len(cfg.sweep_columns)))
        return np.array(self.rows, dtype=float)


    def orders(self):
        """Empirical orders of the fuzzy rows, excluding the classical baseline."""

        return np.array([order for a, _, order in self.rows if a > 0.0][1:])


    def __len__(self):
        return len(self.rows)


    def __str__(self):
        lines = ['Limit sweep: pairing {}, h {}, kmax {}, dt {}, t_end {}'
                 ''.format(self.pairing, self.h, self.kmax, self.dt, self.t_end),
                 '{:>10} {:>14} {:>10}'.format(*cfg.sweep_columns)]
        for a, dist, order in self.rows:
            lines.append('{:>10.4g} {:>14.6e} {:>10.4f}'.format(a, dist, order))

        return '\n'.join(lines)


    def __repr__(self):
        return self.__str__()
