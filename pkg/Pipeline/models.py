# models.py

from django.db import models
from django.utils import timezone


class PipelineRun(models.Model):
    """One invocation of the pipeline: its configuration, outcome and where it wrote."""
    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('processing', 'Processing'),
        ('success', 'Success'),
        ('failed', 'Failed'),
    ]

    SPACE_CHOICES = [
        ('circle', 'Circle'),
        ('moore', 'Moore space'),
        ('lens', 'Lens space'),
    ]

    space = models.CharField(max_length=20, choices=SPACE_CHOICES)
    seed = models.IntegerField(default=0)
    q = models.IntegerField(default=3)
    config = models.JSONField(default=dict, help_text="Validated pipeline configuration")

    # Status tracking
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='pending')
    output_dir = models.CharField(max_length=500, blank=True)

    # Results
    summary = models.JSONField(default=dict, blank=True)
    timings = models.JSONField(default=dict, blank=True, help_text="Seconds per stage")
    failed_stage = models.CharField(max_length=50, blank=True, null=True)
    error_message = models.TextField(blank=True, null=True)
    exit_code = models.IntegerField(null=True, blank=True)

    # Timestamps
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)
    started_at = models.DateTimeField(null=True, blank=True)
    completed_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['space', 'status'], name='pipeline_run_space_status'),
            models.Index(fields=['seed'], name='pipeline_run_seed'),
        ]
        verbose_name = "Pipeline Run"
        verbose_name_plural = "Pipeline Runs"

    def __str__(self):
        return f"{self.space} seed={self.seed} q={self.q} - {self.status}"

    def mark_processing(self):
        self.status = 'processing'
        self.started_at = timezone.now()
        self.save()

    def mark_success(self, summary=None, timings=None):
        self.status = 'success'
        self.completed_at = timezone.now()
        self.error_message = None
        self.exit_code = 0
        if summary:
            self.summary = summary
        if timings:
            self.timings = timings
        self.save()

    def mark_failed(self, stage, error_message, exit_code, timings=None):
        self.status = 'failed'
        self.completed_at = timezone.now()
        self.failed_stage = stage
        self.error_message = error_message
        self.exit_code = exit_code
        if timings:
            self.timings = timings
        self.save()


class StageLog(models.Model):
    """Per-stage record of a run"""
    run = models.ForeignKey(PipelineRun, on_delete=models.CASCADE, related_name='logs')
    stage = models.CharField(max_length=50)
    level = models.CharField(max_length=10, choices=[
        ('DEBUG', 'Debug'),
        ('INFO', 'Info'),
        ('WARNING', 'Warning'),
        ('ERROR', 'Error'),
    ], default='INFO')
    message = models.TextField()
    duration = models.FloatField(null=True, blank=True, help_text="Seconds")
    details = models.JSONField(default=dict, blank=True)
    timestamp = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['timestamp', 'id']
        verbose_name = "Stage Log"
        verbose_name_plural = "Stage Logs"

    def __str__(self):
        return f"{self.run_id} {self.stage} [{self.level}]"
