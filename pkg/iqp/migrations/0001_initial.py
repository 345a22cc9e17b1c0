# Generated by Django 5.1.6 on 2025-03-04 16:13

import iqp.reports
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(db_index=True, max_length=32)),
                ('schema_version', models.PositiveSmallIntegerField(default=1)),
                ('seed', models.CharField(blank=True, default='', max_length=20)),
                ('config', models.JSONField(encoder=iqp.reports.ReportEncoder)),
                ('summary', models.JSONField(default=dict, encoder=iqp.reports.ReportEncoder)),
                ('checks', models.JSONField(default=list, encoder=iqp.reports.ReportEncoder)),
                ('decisions', models.JSONField(default=list)),
                ('passed', models.BooleanField(default=True)),
                ('wall_clock_s', models.FloatField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
            },
        ),
    ]
