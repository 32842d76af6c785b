import logging
import sys
import time
import uuid
from contextlib import contextmanager
from types import SimpleNamespace

# OpenTelemetry imports
from opentelemetry import metrics, trace
from opentelemetry.exporter.otlp.proto.grpc.metric_exporter import OTLPMetricExporter
from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import PeriodicExportingMetricReader
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor
from opentelemetry.trace import SpanKind, Status, StatusCode

# OpenTelemetry logging imports
from opentelemetry._logs import set_logger_provider
from opentelemetry.exporter.otlp.proto.grpc._log_exporter import OTLPLogExporter
from opentelemetry.sdk._logs import LoggerProvider, LoggingHandler
from opentelemetry.sdk._logs.export import BatchLogRecordProcessor

# JSON logging for OpenTelemetry
from pythonjsonlogger import jsonlogger

logger = logging.getLogger(__name__)

# Solver and construction times range from microseconds (gallery) to minutes (acceptance sweeps).
LATENCY_BUCKETS = [0.001, 0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 60.0, 120.0, 300.0]
ARENA_SIZE_BUCKETS = [10, 100, 1_000, 10_000, 100_000, 1_000_000, 3_000_000]


class Telemetry:
    """Logging, metrics and tracing for one process.

    With `enabled` off nothing is exported: the OpenTelemetry API hands out no-op meters and
    tracers, so instrumented code behaves the same either way.
    """

    def __init__(self, service_name, endpoint, enabled=False, log_level="INFO"):
        self.service_name = service_name
        self.endpoint = endpoint
        self.enabled = enabled
        self.log_level = log_level

        # Create shared resource for logs, metrics and tracing
        self.resource = Resource.create(
            {
                "service.name": self.service_name,
                "service.instance.id": uuid.uuid4().hex[:12],
            }
        )

        self.setup_logging()

        self.metrics = self.setup_metrics()
        self.tracer = self.setup_tracing()

    def setup_logging(self):
        """Console logs on stderr (stdout carries command output), plus OTLP export when enabled."""
        root_logger = logging.getLogger()
        root_logger.setLevel(self.log_level)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(logging.Formatter("[%(name)s] %(message)s"))
        root_logger.addHandler(console_handler)

        if not self.enabled:
            return

        otel_logger_provider = LoggerProvider(resource=self.resource)
        set_logger_provider(otel_logger_provider)

        otlp_log_exporter = OTLPLogExporter(endpoint=self.endpoint, insecure=True)
        otel_logger_provider.add_log_record_processor(BatchLogRecordProcessor(otlp_log_exporter))

        otel_handler = LoggingHandler(level=logging.NOTSET, logger_provider=otel_logger_provider)
        otel_handler.setFormatter(jsonlogger.JsonFormatter(json_ensure_ascii=False))
        root_logger.addHandler(otel_handler)

        logger.info("OpenTelemetry logging configured")

    def setup_metrics(self):
        if self.enabled:
            logger.info(f"Setting up OpenTelemetry metrics for {self.service_name} at {self.endpoint}")
            otlp_reader = PeriodicExportingMetricReader(
                exporter=OTLPMetricExporter(endpoint=self.endpoint, insecure=True),
                export_interval_millis=15000,
            )
            metrics.set_meter_provider(MeterProvider(metric_readers=[otlp_reader], resource=self.resource))

        meter = metrics.get_meter("hd_workbench_metrics")

        arenas_built = meter.create_counter(
            name="arenas_built_total", description="Game arenas constructed, by game kind", unit="1"
        )
        arenas_solved = meter.create_counter(
            name="arenas_solved_total", description="Arenas solved, by winner at the initial node", unit="1"
        )
        lassos_sampled = meter.create_counter(
            name="lassos_sampled_total", description="Lassos drawn for membership checks", unit="1"
        )
        certificates = meter.create_counter(
            name="certificates_total", description="Ghost and spoiler certificates, by outcome", unit="1"
        )
        cli_commands = meter.create_counter(
            name="cli_commands_total", description="CLI commands run, by command and exit code", unit="1"
        )

        arena_nodes = meter.create_histogram(
            name="arena_nodes",
            description="Number of nodes per constructed arena",
            unit="1",
            explicit_bucket_boundaries_advisory=ARENA_SIZE_BUCKETS,
        )
        solve_latency = meter.create_histogram(
            name="solve_latency",
            description="Game solving latency in seconds",
            unit="s",
            explicit_bucket_boundaries_advisory=LATENCY_BUCKETS,
        )
        construction_latency = meter.create_histogram(
            name="construction_latency",
            description="Automaton and arena construction latency in seconds",
            unit="s",
            explicit_bucket_boundaries_advisory=LATENCY_BUCKETS,
        )

        # Readable elapsed-time helper returning seconds
        def timer():
            t0 = time.monotonic()

            def elapsed_s():
                return time.monotonic() - t0

            return elapsed_s

        return SimpleNamespace(
            arenas_built=arenas_built,
            arenas_solved=arenas_solved,
            lassos_sampled=lassos_sampled,
            certificates=certificates,
            cli_commands=cli_commands,
            arena_nodes=arena_nodes,
            solve_latency=solve_latency,
            construction_latency=construction_latency,
            timer=timer,
        )

    def setup_tracing(self):
        if self.enabled:
            span_processor = BatchSpanProcessor(OTLPSpanExporter(endpoint=self.endpoint, insecure=True))
            trace_provider = TracerProvider(resource=self.resource)
            trace_provider.add_span_processor(span_processor)
            trace.set_tracer_provider(trace_provider)
            logger.info(f"Tracer provider configured with OTLP exporter targeting {self.endpoint}")

        return trace.get_tracer("hd_workbench_tracer")

    @contextmanager
    def create_span(self, name, kind=SpanKind.INTERNAL, attributes=None):
        """Create a span as a context manager for tracing operations"""
        if attributes is None:
            attributes = {}

        span = self.tracer.start_span(name, kind=kind, attributes=attributes)
        try:
            with trace.use_span(span, end_on_exit=False):
                yield span
                span.set_status(Status(StatusCode.OK))
                span.end()
        except Exception as e:
            span.set_status(Status(StatusCode.ERROR))
            span.record_exception(e)
            span.end()
            raise

    def shutdown(self):
        """Flush exporters before the process exits."""
        if not self.enabled:
            return
        for provider in (metrics.get_meter_provider(), trace.get_tracer_provider()):
            if hasattr(provider, "shutdown"):
                provider.shutdown()
