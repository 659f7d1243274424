from contextlib import contextmanager
from time import perf_counter
from typing import Dict, Iterator, List, Optional

import numpy as np

from app.core.logger import logger
from app.api.exceptions import SolverException, StorageException, ToolkitException
from app.domains.certify.schema import SpectralReport
from app.domains.certify.service import CertifyService
from app.domains.eigen.service import EigenService
from app.domains.field2d.model import TensorField
from app.domains.field2d.service import Field2DService
from app.domains.ground_state.model import RadialProfile, SolverMethod
from app.domains.ground_state.service import GroundStateService
from app.domains.mixins import ArrayModel
from app.domains.operators.model import DiscreteOperator
from app.domains.operators.service import OperatorService
from app.domains.pipeline.schema import OperatorSelector, RunConfig
from app.domains.spectral_grid.model import Grid1D
from app.domains.spectral_grid.service import SpectralGridService
from app.repositories.csv_export import CsvTableRepository, FieldCsvRepository
from app.repositories.matrix_dump import MatrixDumpRepository
from app.repositories.profile_cache import RadialProfileRepository
from app.repositories.report import ReportRepository

VALIDATED_MIN_N = 32
VIRIAL_SCALE = 0.5
RESOLUTION_FLAG = 'resolution below validated range'


class GroundStateFields(ArrayModel):
    """Ground state and derived fields on the run grid."""
    profile: RadialProfile
    grid: Grid1D
    Q: TensorField
    Qx: TensorField
    Qy: TensorField

    def as_dict(self) -> Dict[str, TensorField]:
        return {'Q': self.Q, 'Qx': self.Qx, 'Qy': self.Qy}


class PipelineService:
    """
    Orchestrates ground state → grid → fields → operators → eigenpairs → certification → reports.

    Every stage is wrapped so that a failure surfaces as a toolkit exception naming the stage.
    """

    def __init__(
        self,
        config: RunConfig,
        ground_state: GroundStateService,
        grids: SpectralGridService,
        fields: Field2DService,
        operators: OperatorService,
        eigen: EigenService,
        certify: CertifyService
    ):
        """
        Initialize the pipeline for one configuration.

        Args:
            config (RunConfig): Validated run configuration.
            ground_state (GroundStateService): Radial solver.
            grids (SpectralGridService): Grid builder.
            fields (Field2DService): Field operations.
            operators (OperatorService): Operator assembly.
            eigen (EigenService): Eigensolver configured with the run tolerances.
            certify (CertifyService): Certification.
        """
        self.config = config
        self._ground_state = ground_state
        self._grids = grids
        self._fields = fields
        self._operators = operators
        self._eigen = eigen
        self._certify = certify
        self._profiles = RadialProfileRepository(config.cache_dir)
        self._reports = ReportRepository(config.out)
        self._matrices = MatrixDumpRepository(config.out / 'matrices')
        self._field_csv = FieldCsvRepository(config.out / 'slices')
        self._tables = CsvTableRepository(config.out / 'slices')

    @contextmanager
    def _stage(self, name: str) -> Iterator[None]:
        logger.debug('Stage %s started', name)
        try:
            yield
        except ToolkitException as exc:
            exc.stage = name
            raise
        except np.linalg.LinAlgError as exc:
            raise SolverException(f'Linear algebra failure: {exc}', stage=name) from exc
        except OSError as exc:
            raise StorageException(f'I/O failure: {exc}', stage=name) from exc
        except Exception as exc:
            raise ToolkitException(f'Unexpected failure: {exc}', stage=name) from exc
        logger.debug('Stage %s finished', name)

    # --- Stages ---
    def load_profile(self) -> RadialProfile:
        """
        Radial ground state from the cache when valid, otherwise solved and cached.

        Returns:
            RadialProfile: The profile.
        """
        config = self.config
        method = SolverMethod.RENORMALIZATION
        if config.use_cache:
            cached = self._profiles.get_matching(config.L, config.radial_nodes, method)
            if cached is not None:
                return cached
        profile = self._ground_state.solve_radial(config.L, config.radial_nodes, config.tol_radial)
        if config.use_cache:
            self._profiles.save(self._profiles.key_for(config.L, config.radial_nodes, method), profile)
        return profile

    def build_fields(self, profile: RadialProfile) -> GroundStateFields:
        """
        Grid, Q and its spectral derivatives.

        Args:
            profile (RadialProfile): Radial ground state.

        Returns:
            GroundStateFields: Fields on the run grid.
        """
        with self._stage('grid'):
            grid = self._grids.build_grid(self.config.N, self.config.L, self.config.a)
        with self._stage('fields'):
            Q = self._fields.radial_to_field(profile, grid)
            Qx = self._operators.derivative_x(Q)
            Qy = self._operators.derivative_y(Q)
        return GroundStateFields(profile=profile, grid=grid, Q=Q, Qx=Qx, Qy=Qy)

    def selected_operators(self) -> List[OperatorSelector]:
        if self.config.operator == OperatorSelector.ALL:
            return [OperatorSelector.M, OperatorSelector.B2, OperatorSelector.L_OP, OperatorSelector.P2BAR]
        return [self.config.operator]

    def assemble(self, selector: OperatorSelector, state: GroundStateFields) -> DiscreteOperator:
        """Assemble the operator a selector names."""
        if selector == OperatorSelector.M:
            return self._operators.assemble_M(state.Q, Qx=state.Qx)
        if selector == OperatorSelector.B2:
            return self._operators.assemble_B2(state.Q, state.Qx)
        if selector == OperatorSelector.P2BAR:
            return self._operators.assemble_M(state.Q, Qx=state.Qx, self_adjoint=False)
        return self._operators.assemble_L(state.Q)

    def analyse(self, selector: OperatorSelector, state: GroundStateFields) -> SpectralReport:
        """
        Eigenpairs and certification of one operator.

        The virial operators M, 2B and the non-self-adjoint variant are certified as B + P
        (scale ½, λ_⊥ = ½); ℒ is certified by the constrained minimum under {Q³, Q_x, Q_y}.

        Args:
            selector (OperatorSelector): Operator to analyse.
            state (GroundStateFields): Fields on the run grid.

        Returns:
            SpectralReport: The report, timed.
        """
        started = perf_counter()
        with self._stage('operators'):
            op = self.assemble(selector, state)
            if self.config.dump_matrices:
                self._matrices.save(f'matrix_{op.label.value}_N{self.config.N}', op.matrix)
        references = [state.Q.interior_vector(), state.Qx.interior_vector(), state.Qy.interior_vector()]
        with self._stage('eigen'):
            pairs = self._eigen.eig_below(op, op.ess_min, self.config.max_k, references)
        with self._stage('certify'):
            if selector == OperatorSelector.L_OP:
                cubic = state.Q.with_values(state.Q.values ** 3)
                report = self._certify.certify_constrained(op, pairs, state.Q, state.Qx, [cubic, state.Qx, state.Qy])
            else:
                report = self._certify.certify_coercivity(
                    state.Q, state.Qx, pairs, VIRIAL_SCALE * op.ess_min, operator=op.label.value,
                    scale=VIRIAL_SCALE, symmetric_in_form=op.symmetric_in_form
                )
        return report.model_copy(update={'wall_time_s': perf_counter() - started})

    def lemma_constant(self, state: GroundStateFields, L_op: Optional[DiscreteOperator] = None) -> Optional[float]:
        """
        C₁ = 1/μ, μ the minimum of ℒ under {Q³, Q_x, Q_y}; None when μ ≤ 0.

        Args:
            state (GroundStateFields): Fields on the run grid.
            L_op (Optional[DiscreteOperator]): Pre-assembled ℒ.

        Returns:
            Optional[float]: The estimate.
        """
        with self._stage('certify'):
            L_op = L_op or self._operators.assemble_L(state.Q)
            cubic = state.Q.with_values(state.Q.values ** 3)
            minimum = self._certify.constrained_rayleigh_min(L_op, [cubic, state.Qx, state.Qy])
        if minimum <= 0:
            logger.warning('Constrained minimum of the linearized operator is %.6f; no C1 estimate', minimum)
            return None
        return 1.0 / minimum

    # --- Orchestration ---
    def run_pipeline(self) -> List[SpectralReport]:
        """
        Run every stage for the configured operators and write the reports.

        Returns:
            List[SpectralReport]: One report per analysed operator.
        """
        config = self.config
        logger.info('Running pipeline: %s', config.model_dump(mode='json'))
        resolution_flags: List[str] = []
        if config.N < VALIDATED_MIN_N:
            logger.warning('N=%d is below the validated range (N ≥ %d); results are flagged', config.N, VALIDATED_MIN_N)
            resolution_flags.append(RESOLUTION_FLAG)

        with self._stage('ground_state'):
            profile = self.load_profile()
        state = self.build_fields(profile)

        reports: List[SpectralReport] = []
        for selector in self.selected_operators():
            report = self.analyse(selector, state)
            reports.append(report)

        c1 = next((r.c1_estimate for r in reports if r.c1_estimate is not None), None)
        if c1 is None:
            c1 = self.lemma_constant(state)
        reports = [
            r.model_copy(update={'c1_estimate': c1, 'flags': r.flags + resolution_flags}) for r in reports
        ]

        with self._stage('report'):
            for selector, report in zip(self.selected_operators(), reports):
                path = self._reports.save(f'report_{selector.value}', report)
                logger.info('Report for %s written to %s (verdict=%s)', report.operator, path, report.verdict.value)
                if config.emit_slices:
                    self.emit_slices(report, state.as_dict(), profile)
            if config.emit_slices:
                self.write_summary(reports)
        logger.info('Pipeline finished with %d report(s)', len(reports))
        return reports

    # --- Plot data ---
    def emit_slices(self, report: SpectralReport, fields: Dict[str, TensorField], profile: Optional[RadialProfile] = None) -> None:
        """
        Write plot data: field tables, y = 0 eigenfunction slices, the angle table and the radial profile.

        Args:
            report (SpectralReport): Completed report with its eigenpairs.
            fields (Dict[str, TensorField]): Named fields to export.
            profile (Optional[RadialProfile]): Radial profile to export.

        Raises:
            StorageException: On I/O failures.
        """
        for name, field in fields.items():
            self._field_csv.save_field(f'field_{name}', field)

        if report.pairs:
            grid = report.pairs[0].grid
            center = grid.N // 2
            eigenfunctions = [TensorField.from_interior(grid, pair.vector) for pair in report.pairs]
            rows = [
                {'x': float(x), **{f'phi_{k + 1}': float(f.values[i, center]) for k, f in enumerate(eigenfunctions)}}
                for i, x in enumerate(grid.x)
            ]
            self._tables.save(f'slices_{report.operator}', rows)

        angle_rows = [
            {
                'index': k + 1, 'eigenvalue': value, 'parity': parity,
                'angle_Q': report.angles.Q[k], 'angle_Qx': report.angles.Qx[k]
            }
            for k, (value, parity) in enumerate(zip(report.eigenvalues, report.parities))
        ]
        self._tables.save(f'angles_{report.operator}', angle_rows)

        if profile is not None:
            self._tables.save('radial_profile', [
                {'r': float(r), 'value': float(v), 'deriv': float(d)}
                for r, v, d in zip(profile.nodes, profile.values, profile.deriv)
            ])
        logger.info('Plot data for %s written to %s', report.operator, self._tables.root)

    def write_summary(self, reports: List[SpectralReport]) -> None:
        """One row per report: eigenvalues, bounds and verdict."""
        rows = [
            {
                'operator': r.operator, 'N': r.grid.N, 'L': r.grid.L, 'a': r.grid.a,
                'eigenvalues': ' '.join(f'{v:.6f}' for v in r.eigenvalues),
                'bound_odd': r.bounds.odd, 'bound_even': r.bounds.even, 'bound_overall': r.bounds.overall,
                'verdict': r.verdict.value, 'c1_estimate': r.c1_estimate,
            }
            for r in reports
        ]
        self._tables.save('summary', rows)
